#include "einselect/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace einselect::io {

std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void write_matrix_csv(std::ostream& os, const QOperator& m) {
    os << "dim=" << m.rows() << "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) os << ",";
            os << format_double(m(i, j).real()) << ":" << format_double(m(i, j).imag());
        }
        os << "\n";
    }
}

void write_matrix_csv(const std::filesystem::path& path, const QOperator& m) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_matrix_csv: cannot open " + path.string());
    write_matrix_csv(os, m);
}

namespace {

double parse_double(const std::string& s, const std::string& what) {
    double value = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || res.ptr != end)
        throw std::runtime_error(what + ": bad numeric field '" + s + "'");
    return value;
}

} // namespace

QOperator read_matrix_csv(std::istream& is, const std::string& what) {
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error(what + ": empty input");
    if (line.rfind("dim=", 0) != 0)
        throw std::runtime_error(what + ": expected 'dim=<d>' header, got '" + line + "'");
    long d = 0;
    try {
        d = std::stol(line.substr(4));
    } catch (const std::exception&) {
        throw std::runtime_error(what + ": bad dim header '" + line + "'");
    }
    if (d <= 0)
        throw std::runtime_error(what + ": dim must be positive");
    QOperator m(d, d);
    for (long i = 0; i < d; ++i) {
        if (!std::getline(is, line))
            throw std::runtime_error(what + ": truncated after " + std::to_string(i) + " rows");
        std::stringstream row(line);
        std::string cell;
        for (long j = 0; j < d; ++j) {
            if (!std::getline(row, cell, ','))
                throw std::runtime_error(what + ": row " + std::to_string(i) +
                                         " has fewer than " + std::to_string(d) + " entries");
            const auto colon = cell.find(':');
            if (colon == std::string::npos)
                throw std::runtime_error(what + ": entry '" + cell + "' is not re:im");
            m(i, j) = Complex(parse_double(cell.substr(0, colon), what),
                              parse_double(cell.substr(colon + 1), what));
        }
        if (std::getline(row, cell, ','))
            throw std::runtime_error(what + ": row " + std::to_string(i) + " has extra entries");
    }
    return m;
}

QOperator read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_matrix_csv: cannot open " + path.string());
    return read_matrix_csv(is, path.string());
}

} // namespace einselect::io
