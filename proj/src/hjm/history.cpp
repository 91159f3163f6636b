// SPDX-License-Identifier: Apache-2.0
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qhjm/error.hpp"
#include "qhjm/hjm.hpp"

namespace qhjm::hjm {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t");
        const auto e = cell.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s, const std::string& where) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ValidationError(where + ": '" + s + "' is not a number");
    }
    if (pos != s.size()) throw ValidationError(where + ": '" + s + "' is not a number");
    if (!std::isfinite(v)) throw ValidationError(where + ": non-finite value");
    return v;
}

}  // namespace

double parse_tenor_label(const std::string& label) {
    const std::string prefix = "tenor_";
    if (label.rfind(prefix, 0) != 0) throw ValidationError("history: column '" + label + "' lacks the tenor_ prefix");
    std::string body = label.substr(prefix.size());
    if (body.empty()) throw ValidationError("history: empty tenor in column '" + label + "'");
    double scale = 1.0;
    switch (body.back()) {
        case 'd': scale = 1.0 / 365.0; break;
        case 'w': scale = 7.0 / 365.0; break;
        case 'm': scale = 1.0 / 12.0; break;
        case 'y': scale = 1.0; break;
        default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(body.back()))) body.pop_back();
    const double v = parse_number(body, "history: column '" + label + "'") * scale;
    if (!(v > 0.0)) throw ValidationError("history: tenor in column '" + label + "' must be positive");
    return v;
}

RateHistory read_history_csv(std::istream& in, double annualization) {
    if (!(annualization > 0.0)) throw ValidationError("history: annualization must be positive");
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") != std::string::npos) header = split_row(line);
    }
    if (header.size() < 2 || header.front() != "date")
        throw ValidationError("history: header must read date,tenor_...");

    std::vector<double> tenors;
    for (std::size_t c = 1; c < header.size(); ++c) tenors.push_back(parse_tenor_label(header[c]));
    RateHistory h;
    try {
        h.grid = MaturityGrid(tenors);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("history: tenor columns: ") + e.what());
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto cells = split_row(line);
        const std::string where = "history: line " + std::to_string(line_no);
        if (cells.size() != header.size())
            throw ValidationError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                                  std::to_string(cells.size()));
        if (cells.front().empty()) throw ValidationError(where + ": empty date");
        ForwardCurve c;
        c.time = static_cast<double>(h.curves.size()) / annualization;
        c.maturities = tenors;
        for (std::size_t k = 1; k < cells.size(); ++k) c.rates.push_back(parse_number(cells[k], where));
        h.dates.push_back(cells.front());
        h.curves.push_back(std::move(c));
    }
    if (h.curves.empty()) throw ValidationError("history: no observations");
    return h;
}

RateHistory read_history_csv_file(const std::string& path, double annualization) {
    std::ifstream in(path);
    if (!in) throw ValidationError("history: cannot open '" + path + "'");
    return read_history_csv(in, annualization);
}

}  // namespace qhjm::hjm
