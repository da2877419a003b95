#pragma once

// Plain-text interchange in the CPLEX LP subset
//
//   \ comment
//   Maximize
//    obj: 0.11 sell_1_1_1 - 0.1 buy_1_1_1
//   Subject To
//    balance_1_1: pv_1_1 + wt_1_1 + bat_1_1 + buy_1_1_1 - sell_1_1_1 = 2
//   Bounds
//    0 <= pv_1_1 <= 5
//   Binaries
//    X_1_1_1
//   End
//
// plus a solution file of `name value` lines under the header
// `# mgsched solution v1`.

#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mgsched/error.hpp"
#include "mgsched/lp.hpp"
#include "mgsched/mip.hpp"
#include "mgsched/textio.hpp"

namespace mgsched {

inline constexpr const char* kSolutionHeader = "# mgsched solution v1";

namespace detail {

inline std::string lp_col_name(const LinearProgram& lp, int j) {
    if (j < static_cast<int>(lp.col_names.size()) && !lp.col_names[j].empty()) return lp.col_names[j];
    return "x" + std::to_string(j + 1);
}

inline void write_terms(std::ostringstream& os, const LinearProgram& lp, std::span<const int> cols,
                        std::span<const double> vals) {
    if (cols.empty()) {
        os << " 0 " << lp_col_name(lp, 0);
        return;
    }
    for (std::size_t k = 0; k < cols.size(); ++k) {
        const double a = vals[k];
        if (k > 0 && k % 8 == 0) os << "\n   ";
        if (k == 0) os << (a < 0 ? " - " : " ");
        else os << (a < 0 ? " - " : " + ");
        os << text::format_double(std::abs(a)) << ' ' << lp_col_name(lp, cols[k]);
    }
}

inline std::string format_bound(double v) {
    if (v == kInf) return "+inf";
    if (v == -kInf) return "-inf";
    return text::format_double(v);
}

} // namespace detail

inline std::string write_lp(const LinearProgram& lp, const std::vector<int>& binaries, const std::string& title = {}) {
    std::ostringstream os;
    if (!title.empty()) os << "\\ " << title << '\n';
    os << "Maximize\n obj:";
    std::vector<int> oc;
    std::vector<double> ov;
    for (int j = 0; j < lp.num_cols(); ++j)
        if (lp.objective[j] != 0.0) {
            oc.push_back(j);
            ov.push_back(lp.objective[j]);
        }
    if (lp.num_cols() > 0) detail::write_terms(os, lp, oc, ov);
    os << "\nSubject To\n";
    for (int i = 0; i < lp.num_rows(); ++i) {
        std::string name = i < static_cast<int>(lp.row_names.size()) && !lp.row_names[i].empty()
                               ? lp.row_names[i]
                               : "c" + std::to_string(i + 1);
        os << ' ' << name << ':';
        detail::write_terms(os, lp, lp.row_cols(i), lp.row_vals(i));
        const char* op = lp.sense[i] == RowSense::le ? " <= " : (lp.sense[i] == RowSense::ge ? " >= " : " = ");
        os << op << text::format_double(lp.rhs[i]) << '\n';
    }
    os << "Bounds\n";
    for (int j = 0; j < lp.num_cols(); ++j) {
        if (lp.lower[j] == lp.upper[j])
            os << ' ' << detail::lp_col_name(lp, j) << " = " << text::format_double(lp.lower[j]) << '\n';
        else
            os << ' ' << detail::format_bound(lp.lower[j]) << " <= " << detail::lp_col_name(lp, j)
               << " <= " << detail::format_bound(lp.upper[j]) << '\n';
    }
    if (!binaries.empty()) {
        os << "Binaries\n";
        for (std::size_t k = 0; k < binaries.size(); ++k) {
            os << ' ' << detail::lp_col_name(lp, binaries[k]);
            if (k % 8 == 7 || k + 1 == binaries.size()) os << '\n';
        }
    }
    os << "End\n";
    return os.str();
}

struct LpFile {
    LinearProgram lp;
    std::vector<int> binaries;
};

namespace detail {

class LpTokenizer {
public:
    explicit LpTokenizer(std::string_view src) {
        for (auto line : text::lines(src)) {
            auto cut = line.find('\\');
            if (cut != std::string_view::npos) line = line.substr(0, cut);
            std::size_t i = 0;
            while (i < line.size()) {
                const char c = line[i];
                if (c == ' ' || c == '\t') {
                    ++i;
                    continue;
                }
                if (c == '<' || c == '>' || c == '=') {
                    std::string op(1, c);
                    ++i;
                    if (i < line.size() && line[i] == '=') {
                        op += '=';
                        ++i;
                    }
                    if (op == "=<") op = "<=";
                    if (op == "=>") op = ">=";
                    if (op == "<") op = "<=";
                    if (op == ">") op = ">=";
                    toks_.push_back(op);
                    continue;
                }
                if (c == '+' || c == '-' || c == ':') {
                    toks_.emplace_back(1, c);
                    ++i;
                    continue;
                }
                std::size_t j = i;
                while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '<' && line[j] != '>' &&
                       line[j] != '=' && line[j] != ':' && !((line[j] == '+' || line[j] == '-') && j > i &&
                                                           line[j - 1] != 'e' && line[j - 1] != 'E'))
                    ++j;
                toks_.emplace_back(line.substr(i, j - i));
                i = j;
            }
            toks_.push_back("\n");
        }
    }
    const std::vector<std::string>& tokens() const { return toks_; }

private:
    std::vector<std::string> toks_;
};

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

} // namespace detail

/// Reads the subset written by write_lp. Columns keep first-appearance order;
/// undeclared bounds default to [0, +inf), which validate() later rejects.
inline LpFile read_lp(std::string_view src) {
    detail::LpTokenizer tz(src);
    const auto& tk = tz.tokens();
    LpFile out;
    auto& lp = out.lp;
    std::unordered_map<std::string, int> index;
    auto col = [&](const std::string& name) {
        auto it = index.find(name);
        if (it != index.end()) return it->second;
        const int j = lp.add_column(0.0, kInf, 0.0, name);
        index.emplace(name, j);
        return j;
    };
    enum class Sec { none, objective, rows, bounds, binaries, done } sec = Sec::none;
    bool maximize = true;
    std::size_t i = 0;
    auto skip_nl = [&]() {
        while (i < tk.size() && tk[i] == "\n") ++i;
    };
    auto section_of = [&](const std::string& t, std::size_t at) -> std::pair<Sec, std::size_t> {
        const std::string l = detail::lower(t);
        if (l == "maximize" || l == "max" || l == "maximum") {
            maximize = true;
            return {Sec::objective, 1};
        }
        if (l == "minimize" || l == "min" || l == "minimum") {
            maximize = false;
            return {Sec::objective, 1};
        }
        if ((l == "subject" || l == "such") && at + 1 < tk.size() && detail::lower(tk[at + 1]) == "to")
            return {Sec::rows, 2};
        if (l == "st" || l == "s.t.") return {Sec::rows, 1};
        if (l == "bounds" || l == "bound") return {Sec::bounds, 1};
        if (l == "binaries" || l == "binary" || l == "bin") return {Sec::binaries, 1};
        if (l == "end") return {Sec::done, 1};
        return {Sec::none, 0};
    };
    // Parses `[name:] term term ...` up to an operator, newline-insensitive.
    auto parse_expr = [&](std::vector<std::pair<int, double>>& terms, bool stop_at_section) {
        double sign = 1.0;
        double coef = 1.0;
        while (i < tk.size()) {
            const std::string& t = tk[i];
            if (t == "\n") {
                ++i;
                if (stop_at_section) {
                    skip_nl();
                    if (i >= tk.size() || section_of(tk[i], i).first != Sec::none) return;
                    if (i + 1 < tk.size() && tk[i + 1] == ":") return;
                }
                continue;
            }
            if (t == "<=" || t == ">=" || t == "=") return;
            if (t == "+") {
                sign = 1.0;
                ++i;
                continue;
            }
            if (t == "-") {
                sign = -1.0;
                ++i;
                continue;
            }
            if (auto v = text::parse_double(t)) {
                coef *= *v;
                ++i;
                continue;
            }
            terms.emplace_back(col(t), sign * coef);
            sign = 1.0;
            coef = 1.0;
            ++i;
        }
    };
    auto read_number = [&]() {
        double sign = 1.0;
        if (tk[i] == "-") {
            sign = -1.0;
            ++i;
        } else if (tk[i] == "+") {
            ++i;
        }
        const std::string l = detail::lower(tk[i]);
        ++i;
        if (l == "inf" || l == "infinity") return sign * kInf;
        auto v = text::parse_double(l);
        if (!v) throw SchemaError("LP file: expected a number, got '" + l + "'");
        return sign * *v;
    };

    while (i < tk.size() && sec != Sec::done) {
        skip_nl();
        if (i >= tk.size()) break;
        auto [s, width] = section_of(tk[i], i);
        if (s != Sec::none && !(i + 1 < tk.size() && tk[i + 1] == ":")) {
            sec = s;
            i += width;
            continue;
        }
        switch (sec) {
        case Sec::none:
            throw SchemaError("LP file: content before the objective section");
        case Sec::objective: {
            if (i + 1 < tk.size() && tk[i + 1] == ":") i += 2;
            std::vector<std::pair<int, double>> terms;
            parse_expr(terms, true);
            for (auto [j, a] : terms) lp.objective[j] += maximize ? a : -a;
            break;
        }
        case Sec::rows: {
            std::string name;
            if (i + 1 < tk.size() && tk[i + 1] == ":") {
                name = tk[i];
                i += 2;
            }
            std::vector<std::pair<int, double>> terms;
            parse_expr(terms, false);
            if (i >= tk.size()) throw SchemaError("LP file: constraint without operator");
            const std::string op = tk[i++];
            skip_nl();
            const double rhs = read_number();
            const RowSense sense = op == "<=" ? RowSense::le : (op == ">=" ? RowSense::ge : RowSense::eq);
            lp.add_row(std::move(terms), sense, rhs, name.empty() ? "c" + std::to_string(lp.num_rows() + 1) : name);
            break;
        }
        case Sec::bounds: {
            // forms: lo <= x <= hi | x = v | x <= hi | x >= lo | x free
            std::vector<std::string> line;
            while (i < tk.size() && tk[i] != "\n") line.push_back(tk[i++]);
            auto num = [&](std::size_t& k) {
                double sign = 1.0;
                if (line[k] == "-" || line[k] == "+") {
                    sign = line[k] == "-" ? -1.0 : 1.0;
                    ++k;
                }
                const std::string l = detail::lower(line[k++]);
                if (l == "inf" || l == "infinity") return sign * kInf;
                auto v = text::parse_double(l);
                if (!v) throw SchemaError("LP file: bad bound value '" + l + "'");
                return sign * *v;
            };
            std::size_t k = 0;
            if (line.size() >= 2 && detail::lower(line[1]) == "free") {
                int j = col(line[0]);
                lp.lower[j] = -kInf;
                lp.upper[j] = kInf;
                break;
            }
            const bool leading_number = text::parse_double(line[0]).has_value() || line[0] == "-" || line[0] == "+";
            if (leading_number) {
                const double lo = num(k);
                if (k >= line.size() || line[k] != "<=") throw SchemaError("LP file: malformed bound");
                ++k;
                const int j = col(line[k++]);
                lp.lower[j] = lo;
                if (k < line.size()) {
                    if (line[k] != "<=") throw SchemaError("LP file: malformed bound");
                    ++k;
                    lp.upper[j] = num(k);
                }
            } else {
                const int j = col(line[k++]);
                if (k >= line.size()) throw SchemaError("LP file: malformed bound");
                const std::string op = line[k++];
                const double v = num(k);
                if (op == "=") lp.lower[j] = lp.upper[j] = v;
                else if (op == "<=") lp.upper[j] = v;
                else lp.lower[j] = v;
            }
            break;
        }
        case Sec::binaries: {
            while (i < tk.size() && tk[i] != "\n") {
                const int j = col(tk[i++]);
                out.binaries.push_back(j);
                if (lp.upper[j] == kInf) lp.upper[j] = 1.0;
            }
            break;
        }
        case Sec::done: break;
        }
    }
    return out;
}

inline std::string write_solution(const LinearProgram& lp, const std::vector<double>& x) {
    std::string out = std::string(kSolutionHeader) + "\n";
    for (int j = 0; j < lp.num_cols(); ++j) {
        out += detail::lp_col_name(lp, j);
        out += ' ';
        out += text::format_double(x.at(j));
        out += '\n';
    }
    return out;
}

inline std::vector<std::pair<std::string, double>> read_solution(std::string_view src) {
    auto ls = text::lines(src);
    std::vector<std::pair<std::string, double>> out;
    bool header = false;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        auto line = text::trim(ls[i]);
        if (line.empty()) continue;
        if (!header) {
            if (line != kSolutionHeader) throw SchemaError("solution file must start with '" + std::string(kSolutionHeader) + "'");
            header = true;
            continue;
        }
        if (line.front() == '#') continue;
        const auto sp = line.find_first_of(" \t");
        if (sp == std::string_view::npos) throw SchemaError("solution line " + std::to_string(i + 1) + ": expected 'name value'");
        auto v = text::parse_double(line.substr(sp + 1));
        if (!v) throw SchemaError("solution line " + std::to_string(i + 1) + ": bad value");
        out.emplace_back(std::string(line.substr(0, sp)), *v);
    }
    if (!header) throw SchemaError("empty solution file");
    return out;
}

} // namespace mgsched
