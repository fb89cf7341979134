#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>

#include "fracl1/errors.hpp"
#include "fracl1/experiment.hpp"

namespace fracl1 {

namespace {

constexpr const char* csv_header = "problem,alpha,beta,ic,t,M,N,error_raw,error_normalized,rate";

std::string fmt9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string fmt_short(double v, const char* spec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ArgumentError("CSV line " + std::to_string(line_no) + ": cannot parse number '" + s + "'");
    }
}

std::size_t parse_size(const std::string& s, std::size_t line_no) {
    const double v = parse_double(s, line_no);
    if (!(v >= 0.0) || v != std::floor(v)) {
        throw ArgumentError("CSV line " + std::to_string(line_no) + ": expected a nonnegative integer");
    }
    return static_cast<std::size_t>(v);
}

std::string table_label(const ConvergenceReport& r) {
    std::string s = fmt_short(r.alpha, "%g");
    if (r.beta) s += " | " + fmt_short(*r.beta, "%g");
    return s;
}

}  // namespace

void emit_csv(const std::vector<ConvergenceReport>& reports, std::ostream& out) {
    out << csv_header << '\n';
    for (const auto& r : reports) {
        for (std::size_t i = 0; i < r.rows.size(); ++i) {
            const auto& row = r.rows[i];
            out << to_string(r.problem) << ',' << fmt9(r.alpha) << ',' << (r.beta ? fmt9(*r.beta) : "") << ','
                << to_string(r.ic) << ',' << fmt9(row.t) << ',' << r.M << ',' << row.N << ','
                << fmt9(row.error_raw) << ',' << fmt9(row.error_normalized) << ','
                << (i == 0 ? std::string() : fmt9(row.rate)) << '\n';
        }
    }
}

void emit_markdown(const std::vector<ConvergenceReport>& reports, std::ostream& out) {
    // Consecutive reports sharing sweep type and column values form one table.
    std::size_t i = 0;
    while (i < reports.size()) {
        const auto& first = reports[i];
        auto columns = [](const ConvergenceReport& r) {
            std::vector<double> c;
            for (const auto& row : r.rows) {
                c.push_back(r.sweep == Sweep::target_time ? row.t : static_cast<double>(row.N));
            }
            return c;
        };
        const auto cols = columns(first);
        std::size_t j = i + 1;
        while (j < reports.size() && reports[j].sweep == first.sweep && columns(reports[j]) == cols &&
               reports[j].problem == first.problem) {
            ++j;
        }
        const bool fractional = first.problem == Problem::space_time_fractional;
        const bool t_sweep = first.sweep == Sweep::target_time;
        out << "| alpha |" << (fractional ? " beta |" : "") << " case |";
        if (!t_sweep) out << " t |";
        for (double c : cols) out << ' ' << (t_sweep ? "t=" + fmt_short(c, "%g") : "N=" + fmt_short(c, "%g")) << " |";
        out << " rate |\n|---|" << (fractional ? "---|" : "") << "---|" << (t_sweep ? "" : "---|");
        for (std::size_t k = 0; k < cols.size(); ++k) out << "---|";
        out << "---|\n";
        for (std::size_t k = i; k < j; ++k) {
            const auto& r = reports[k];
            out << "| " << table_label(r) << " | " << to_string(r.ic) << " |";
            if (!t_sweep) out << ' ' << fmt_short(r.rows.empty() ? 0.0 : r.rows.front().t, "%g") << " |";
            for (double e : r.errors()) out << ' ' << fmt_short(e, "%.2e") << " |";
            const double rate = r.rate();
            out << ' ' << (std::isnan(rate) ? std::string("-") : "~ " + fmt_short(rate, "%.2f")) << " |\n";
        }
        out << '\n';
        std::vector<std::string> notes;
        for (std::size_t k = i; k < j; ++k) {
            for (const auto& n : reports[k].notes) {
                if (std::find(notes.begin(), notes.end(), n) == notes.end()) notes.push_back(n);
            }
        }
        if (!notes.empty()) {
            out << "Errors: " << to_string(first.normalization) << ".";
            for (const auto& n : notes) out << "\n- " << n;
            out << "\n\n";
        }
        i = j;
    }
}

void emit(const std::vector<ConvergenceReport>& reports, Format format, std::ostream& out) {
    if (format == Format::csv) emit_csv(reports, out);
    else emit_markdown(reports, out);
}

void emit(const std::vector<ConvergenceReport>& reports, Format format, const std::string& path) {
    if (path.empty() || path == "-") {
        emit(reports, format, std::cout);
        std::cout.flush();
        if (!std::cout) throw IoError("cannot write to standard output");
        return;
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    emit(reports, format, out);
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

std::vector<ConvergenceReport> parse_csv(std::istream& in) {
    std::vector<ConvergenceReport> reports;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ArgumentError("CSV input is empty");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != csv_header) throw ArgumentError("CSV header does not match the report format");
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() != 10) {
            throw ArgumentError("CSV line " + std::to_string(line_no) + ": expected 10 fields");
        }
        ConvergenceRow row;
        row.t = parse_double(f[4], line_no);
        row.N = parse_size(f[6], line_no);
        row.error_raw = parse_double(f[7], line_no);
        row.error_normalized = parse_double(f[8], line_no);
        const bool starts_report = f[9].empty();
        row.rate = starts_report ? std::numeric_limits<double>::quiet_NaN() : parse_double(f[9], line_no);
        if (starts_report || reports.empty()) {
            ConvergenceReport r;
            r.problem = parse_problem(f[0]);
            r.alpha = parse_double(f[1], line_no);
            if (!f[2].empty()) r.beta = parse_double(f[2], line_no);
            r.ic = parse_initial_condition(f[3]);
            r.M = parse_size(f[5], line_no);
            reports.push_back(r);
        }
        auto& r = reports.back();
        if (!r.rows.empty() && r.rows.back().t != row.t) r.sweep = Sweep::target_time;
        r.rows.push_back(row);
    }
    return reports;
}

}  // namespace fracl1
