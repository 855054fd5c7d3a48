#include "qfdiv/matrix_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qfdiv {

namespace {

using nlohmann::json;

void read_grid(const json& grid, const char* key, std::size_t n, Matrix& out, bool imaginary) {
    if (!grid.is_array() || grid.size() != n)
        throw FormatError(std::string("\"") + key + "\" must be an array of " + std::to_string(n) + " rows");
    for (std::size_t i = 0; i < n; ++i) {
        const json& row = grid[i];
        if (!row.is_array() || row.size() != n)
            throw FormatError(std::string("\"") + key + "\" row " + std::to_string(i) + " must have " +
                              std::to_string(n) + " entries");
        for (std::size_t j = 0; j < n; ++j) {
            if (!row[j].is_number())
                throw FormatError(std::string("\"") + key + "\" entries must be numbers");
            const double x = row[j].get<double>();
            if (imaginary)
                out(i, j).imag(x);
            else
                out(i, j).real(x);
        }
    }
}

}  // namespace

HermitianOperator parse_matrix_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("malformed matrix JSON: ") + e.what());
    }
    if (!doc.is_object()) throw FormatError("matrix JSON must be an object");
    if (!doc.contains("dim") || !doc["dim"].is_number_integer() || doc["dim"].get<long long>() < 1)
        throw FormatError("matrix JSON needs a positive integer \"dim\"");
    const auto n = static_cast<std::size_t>(doc["dim"].get<long long>());
    if (!doc.contains("re")) throw FormatError("matrix JSON needs \"re\"");

    Matrix m(n);
    read_grid(doc["re"], "re", n, m, false);
    if (doc.contains("im")) read_grid(doc["im"], "im", n, m, true);
    return HermitianOperator(m, kLoaderHermitianTol);
}

HermitianOperator load_matrix_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open matrix file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_matrix_json(buf.str());
}

std::string dump_matrix_json(const Matrix& m) {
    const std::size_t n = m.dim();
    json re = json::array();
    json im = json::array();
    bool any_imag = false;
    for (std::size_t i = 0; i < n; ++i) {
        json rr = json::array();
        json ri = json::array();
        for (std::size_t j = 0; j < n; ++j) {
            rr.push_back(m(i, j).real());
            ri.push_back(m(i, j).imag());
            any_imag = any_imag || m(i, j).imag() != 0.0;
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ri));
    }
    json doc = {{"dim", n}, {"re", re}};
    if (any_imag) doc["im"] = im;
    return doc.dump();
}

}  // namespace qfdiv
