#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "catsim/gates.hpp"
#include "catsim/measure.hpp"

// A small line-oriented wiring language:
//
//   MODES 3
//   STATE 0 1 = 1.0 |a,a> + 1.0 |-a,-a>       # 'a' is the configured alpha
//   BPS 0 1
//   PHASE 2 pi
//   DISP 2 0.0 1.5707963
//   MEASURE 0 ZERO
//   MEASURE 1 EVEN
//   TARGET 2 = 1.0 |a>
//
// Parsing is total: malformed input yields diagnostics with line and
// column, never an exception.
namespace catsim::circuit {

struct source_loc {
    int line = 0;
    int col = 0;
};

struct diagnostic {
    source_loc loc;
    std::string message;
};

// number + alpha_coeff * alpha + i * imag
struct label_expr {
    double re = 0.0;
    double im = 0.0;
    double alpha_coeff = 0.0;

    cplx value(double alpha) const { return {re + alpha_coeff * alpha, im}; }
    bool operator==(const label_expr&) const = default;
};

struct term_expr {
    cplx coeff{1.0, 0.0};
    std::vector<label_expr> labels;
    bool operator==(const term_expr&) const = default;
};

struct stmt_modes { int count = 0; };
struct stmt_state { std::vector<int> modes; std::vector<term_expr> terms; };
struct stmt_bps { int i = 0; int j = 0; };
struct stmt_phase { int mode = 0; double psi = 0.0; };
struct stmt_disp { int mode = 0; cplx beta; };
struct stmt_measure { int mode = 0; outcome_class cls = outcome_class::zero; };
struct stmt_target { std::vector<int> modes; std::vector<term_expr> terms; };

struct statement {
    source_loc loc;
    std::variant<stmt_modes, stmt_state, stmt_bps, stmt_phase, stmt_disp, stmt_measure,
                 stmt_target>
        node;
};

struct circuit_program {
    std::vector<statement> statements;
    int mode_count = 0;
};

struct parse_result {
    std::optional<circuit_program> program;
    std::vector<diagnostic> diagnostics;
    bool ok() const { return program.has_value(); }
};

namespace detail {

enum class tok_kind { word, number, symbol, end };

struct token {
    tok_kind kind = tok_kind::end;
    std::string text;
    double number = 0.0;
    int col = 0;
};

inline std::vector<token> lex_line(std::string_view line, int line_no,
                                   std::vector<diagnostic>& diags) {
    std::vector<token> toks;
    size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (c == '#') break;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const int col = static_cast<int>(i) + 1;
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = line.data() + i;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) {
                diags.push_back({{line_no, col}, "malformed number"});
                ++i;
                continue;
            }
            toks.push_back(
                {tok_kind::number, std::string(begin, static_cast<const char*>(end)), v, col});
            i += static_cast<size_t>(end - begin);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < line.size() &&
                   (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_'))
                ++j;
            toks.push_back({tok_kind::word, std::string(line.substr(i, j - i)), 0.0, col});
            i = j;
            continue;
        }
        if (std::string_view("|,>=()+-/").find(c) != std::string_view::npos) {
            toks.push_back({tok_kind::symbol, std::string(1, c), 0.0, col});
            ++i;
            continue;
        }
        diags.push_back({{line_no, col}, std::string("unexpected character '") + c + "'"});
        ++i;
    }
    return toks;
}

class line_parser {
public:
    line_parser(std::vector<token> toks, int line_no, std::vector<diagnostic>& diags)
        : toks_(std::move(toks)), line_(line_no), diags_(diags) {}

    bool done() const { return pos_ >= toks_.size(); }
    const token& peek() const {
        static const token end_tok{};
        return done() ? end_tok : toks_[pos_];
    }
    token next() {
        token t = peek();
        if (!done()) ++pos_;
        return t;
    }
    bool accept_symbol(char c) {
        if (peek().kind == tok_kind::symbol && peek().text[0] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void fail(const std::string& msg) {
        diags_.push_back({{line_, done() ? last_col() : peek().col}, msg});
        failed_ = true;
    }
    bool failed() const { return failed_; }
    int last_col() const { return toks_.empty() ? 1 : toks_.back().col + 1; }
    int line() const { return line_; }

    std::optional<int> parse_index(const char* what) {
        const token t = peek();
        if (t.kind != tok_kind::number || t.number != std::floor(t.number) || t.number < 0) {
            fail(std::string("expected ") + what);
            return std::nullopt;
        }
        next();
        return static_cast<int>(t.number);
    }

    std::optional<double> parse_signed_number(const char* what) {
        double sign = 1.0;
        while (peek().kind == tok_kind::symbol && (peek().text[0] == '-' || peek().text[0] == '+')) {
            if (next().text[0] == '-') sign = -sign;
        }
        if (peek().kind != tok_kind::number) {
            fail(std::string("expected ") + what);
            return std::nullopt;
        }
        return sign * next().number;
    }

    // number | [number] 'pi' ['/' number], with optional leading sign
    std::optional<double> parse_angle() {
        double sign = 1.0;
        while (peek().kind == tok_kind::symbol && (peek().text[0] == '-' || peek().text[0] == '+')) {
            if (next().text[0] == '-') sign = -sign;
        }
        double value = 1.0;
        bool saw_number = false;
        if (peek().kind == tok_kind::number) {
            value = next().number;
            saw_number = true;
        }
        bool saw_pi = false;
        if (peek().kind == tok_kind::word && peek().text == "pi") {
            next();
            saw_pi = true;
            value *= std::numbers::pi;
        }
        if (!saw_number && !saw_pi) {
            fail("expected angle");
            return std::nullopt;
        }
        if (accept_symbol('/')) {
            if (peek().kind != tok_kind::number || peek().number == 0.0) {
                fail("expected nonzero divisor");
                return std::nullopt;
            }
            value /= next().number;
        }
        return sign * value;
    }

    // sign? ( number ['a'] | 'a' | '(' re ',' im ')' )
    std::optional<label_expr> parse_label() {
        label_expr out;
        double sign = 1.0;
        while (peek().kind == tok_kind::symbol && (peek().text[0] == '-' || peek().text[0] == '+')) {
            if (next().text[0] == '-') sign = -sign;
        }
        if (accept_symbol('(')) {
            auto re = parse_signed_number("real part");
            if (!re) return std::nullopt;
            if (!accept_symbol(',')) { fail("expected ','"); return std::nullopt; }
            auto im = parse_signed_number("imaginary part");
            if (!im) return std::nullopt;
            if (!accept_symbol(')')) { fail("expected ')'"); return std::nullopt; }
            out.re = sign * *re;
            out.im = sign * *im;
            return out;
        }
        if (peek().kind == tok_kind::number) {
            const double v = next().number;
            if (peek().kind == tok_kind::word && peek().text == "a") {
                next();
                out.alpha_coeff = sign * v;
            } else {
                out.re = sign * v;
            }
            return out;
        }
        if (peek().kind == tok_kind::word && peek().text == "a") {
            next();
            out.alpha_coeff = sign;
            return out;
        }
        fail("expected label");
        return std::nullopt;
    }

    // [sign] [coeff] '|' label (',' label)* '>'
    std::optional<term_expr> parse_term(double outer_sign) {
        term_expr term;
        double sign = outer_sign;
        while (peek().kind == tok_kind::symbol && (peek().text[0] == '-' || peek().text[0] == '+')) {
            if (next().text[0] == '-') sign = -sign;
        }
        if (accept_symbol('(')) {
            auto re = parse_signed_number("real part");
            if (!re) return std::nullopt;
            if (!accept_symbol(',')) { fail("expected ','"); return std::nullopt; }
            auto im = parse_signed_number("imaginary part");
            if (!im) return std::nullopt;
            if (!accept_symbol(')')) { fail("expected ')'"); return std::nullopt; }
            term.coeff = cplx{*re, *im} * sign;
        } else if (peek().kind == tok_kind::number) {
            term.coeff = cplx{sign * next().number, 0.0};
        } else {
            term.coeff = cplx{sign, 0.0};
        }
        if (!accept_symbol('|')) {
            fail("expected '|'");
            return std::nullopt;
        }
        while (true) {
            auto l = parse_label();
            if (!l) return std::nullopt;
            term.labels.push_back(*l);
            if (accept_symbol(',')) continue;
            break;
        }
        if (!accept_symbol('>')) {
            fail("expected '>'");
            return std::nullopt;
        }
        return term;
    }

    std::optional<std::vector<term_expr>> parse_term_list() {
        std::vector<term_expr> terms;
        auto first = parse_term(1.0);
        if (!first) return std::nullopt;
        terms.push_back(*first);
        while (!done()) {
            double sign;
            if (accept_symbol('+')) sign = 1.0;
            else if (accept_symbol('-')) sign = -1.0;
            else { fail("expected '+' or '-'"); return std::nullopt; }
            auto t = parse_term(sign);
            if (!t) return std::nullopt;
            terms.push_back(*t);
        }
        return terms;
    }

private:
    std::vector<token> toks_;
    size_t pos_ = 0;
    int line_;
    std::vector<diagnostic>& diags_;
    bool failed_ = false;
};

}  // namespace detail

inline parse_result parse_circuit(std::string_view text) {
    parse_result result;
    auto& diags = result.diagnostics;
    circuit_program prog;

    bool have_modes = false;
    bool have_target = false;
    std::vector<bool> assigned;  // covered by a STATE statement
    std::vector<bool> measured;

    auto mode_ok = [&](int m, source_loc loc, const char* who) {
        if (!have_modes) return false;
        if (m >= prog.mode_count) {
            diags.push_back({loc, std::string(who) + ": undeclared mode " + std::to_string(m)});
            return false;
        }
        return true;
    };
    auto check_live = [&](int m, source_loc loc, const char* who) {
        if (!mode_ok(m, loc, who)) return false;
        if (measured[m]) {
            diags.push_back({loc, std::string(who) + ": mode " + std::to_string(m) +
                                      " was already measured"});
            return false;
        }
        return true;
    };

    int line_no = 0;
    size_t start = 0;
    while (start <= text.size()) {
        ++line_no;
        size_t nl = text.find('\n', start);
        std::string_view line =
            text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
        start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

        auto toks = detail::lex_line(line, line_no, diags);
        if (toks.empty()) continue;
        detail::line_parser p(std::move(toks), line_no, diags);
        const detail::token head = p.next();
        const source_loc loc{line_no, head.col};

        if (head.kind != detail::tok_kind::word) {
            diags.push_back({loc, "expected a statement keyword"});
            continue;
        }
        const std::string& kw = head.text;

        if (kw == "MODES") {
            if (have_modes) {
                diags.push_back({loc, "duplicate MODES statement"});
                continue;
            }
            auto n = p.parse_index("mode count");
            if (!n || p.failed()) continue;
            if (*n < 1 || *n > 32) {
                diags.push_back({loc, "mode count out of range 1..32"});
                continue;
            }
            prog.mode_count = *n;
            have_modes = true;
            assigned.assign(*n, false);
            measured.assign(*n, false);
            prog.statements.push_back({loc, stmt_modes{*n}});
            if (!p.done()) diags.push_back({loc, "trailing tokens after MODES"});
            continue;
        }
        if (!have_modes) {
            diags.push_back({loc, "MODES must be the first statement"});
            continue;
        }

        if (kw == "STATE" || kw == "TARGET") {
            std::vector<int> ms;
            while (p.peek().kind == detail::tok_kind::number) {
                auto m = p.parse_index("mode index");
                if (!m) break;
                ms.push_back(*m);
            }
            if (p.failed()) continue;
            if (ms.empty()) {
                diags.push_back({loc, kw + ": expected at least one mode"});
                continue;
            }
            if (!p.accept_symbol('=')) {
                diags.push_back({loc, kw + ": expected '='"});
                continue;
            }
            bool bad = false;
            for (size_t i = 0; i < ms.size() && !bad; ++i) {
                if (!mode_ok(ms[i], loc, kw.c_str())) bad = true;
                for (size_t j = i + 1; j < ms.size(); ++j)
                    if (ms[i] == ms[j]) {
                        diags.push_back({loc, kw + ": duplicate mode " + std::to_string(ms[i])});
                        bad = true;
                    }
            }
            if (bad) continue;
            auto terms = p.parse_term_list();
            if (!terms || p.failed()) continue;
            bool arity_ok = true;
            for (const auto& t : *terms)
                if (t.labels.size() != ms.size()) {
                    diags.push_back({loc, kw + ": term has " + std::to_string(t.labels.size()) +
                                              " labels for " + std::to_string(ms.size()) +
                                              " modes"});
                    arity_ok = false;
                }
            if (!arity_ok) continue;
            if (kw == "STATE") {
                bool dup = false;
                for (int m : ms)
                    if (assigned[m]) {
                        diags.push_back(
                            {loc, "STATE: mode " + std::to_string(m) + " already has a state"});
                        dup = true;
                    }
                if (dup) continue;
                for (int m : ms) assigned[m] = true;
                prog.statements.push_back({loc, stmt_state{std::move(ms), std::move(*terms)}});
            } else {
                if (have_target) {
                    diags.push_back({loc, "TARGET: only one target is allowed"});
                    continue;
                }
                have_target = true;
                prog.statements.push_back({loc, stmt_target{std::move(ms), std::move(*terms)}});
            }
            continue;
        }

        if (kw == "BPS") {
            auto i = p.parse_index("mode index");
            auto j = i ? p.parse_index("mode index") : std::nullopt;
            if (!i || !j || p.failed()) continue;
            if (!check_live(*i, loc, "BPS") || !check_live(*j, loc, "BPS")) continue;
            if (*i == *j) {
                diags.push_back({loc, "BPS: modes must differ"});
                continue;
            }
            prog.statements.push_back({loc, stmt_bps{*i, *j}});
            if (!p.done()) diags.push_back({loc, "trailing tokens after BPS"});
            continue;
        }

        if (kw == "PHASE") {
            auto m = p.parse_index("mode index");
            if (!m || p.failed()) continue;
            auto psi = p.parse_angle();
            if (!psi || p.failed()) continue;
            if (!check_live(*m, loc, "PHASE")) continue;
            prog.statements.push_back({loc, stmt_phase{*m, *psi}});
            if (!p.done()) diags.push_back({loc, "trailing tokens after PHASE"});
            continue;
        }

        if (kw == "DISP") {
            auto m = p.parse_index("mode index");
            if (!m || p.failed()) continue;
            auto re = p.parse_signed_number("displacement real part");
            auto im = re ? p.parse_signed_number("displacement imaginary part") : std::nullopt;
            if (!re || !im || p.failed()) continue;
            if (!check_live(*m, loc, "DISP")) continue;
            prog.statements.push_back({loc, stmt_disp{*m, cplx{*re, *im}}});
            if (!p.done()) diags.push_back({loc, "trailing tokens after DISP"});
            continue;
        }

        if (kw == "MEASURE") {
            auto m = p.parse_index("mode index");
            if (!m || p.failed()) continue;
            const detail::token cls = p.next();
            outcome_class oc;
            if (cls.kind == detail::tok_kind::word && cls.text == "ZERO")
                oc = outcome_class::zero;
            else if (cls.kind == detail::tok_kind::word && cls.text == "EVEN")
                oc = outcome_class::even_nonzero;
            else if (cls.kind == detail::tok_kind::word && cls.text == "ODD")
                oc = outcome_class::odd;
            else {
                diags.push_back({loc, "MEASURE: expected ZERO, EVEN or ODD"});
                continue;
            }
            if (!check_live(*m, loc, "MEASURE")) continue;
            measured[*m] = true;
            prog.statements.push_back({loc, stmt_measure{*m, oc}});
            if (!p.done()) diags.push_back({loc, "trailing tokens after MEASURE"});
            continue;
        }

        diags.push_back({loc, "unknown keyword '" + kw + "'"});
    }

    if (!have_modes && diags.empty()) diags.push_back({{1, 1}, "empty program: MODES required"});
    if (diags.empty()) result.program = std::move(prog);
    return result;
}

namespace detail {

inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_label(const label_expr& l) {
    if (l.im == 0.0 && l.alpha_coeff != 0.0 && l.re == 0.0) {
        if (l.alpha_coeff == 1.0) return "a";
        if (l.alpha_coeff == -1.0) return "-a";
        return fmt_num(l.alpha_coeff) + "a";
    }
    if (l.im == 0.0 && l.alpha_coeff == 0.0) return fmt_num(l.re);
    return "(" + fmt_num(l.re + l.alpha_coeff) + "," + fmt_num(l.im) + ")";
}

inline std::string fmt_term(const term_expr& t, bool first) {
    std::string out;
    cplx c = t.coeff;
    if (c.imag() == 0.0) {
        const bool neg = c.real() < 0.0;
        if (!first) out += neg ? " - " : " + ";
        else if (neg) out += "-";
        out += fmt_num(std::abs(c.real())) + " ";
    } else {
        if (!first) out += " + ";
        out += "(" + fmt_num(c.real()) + "," + fmt_num(c.imag()) + ") ";
    }
    out += "|";
    for (size_t i = 0; i < t.labels.size(); ++i) {
        if (i) out += ",";
        out += fmt_label(t.labels[i]);
    }
    out += ">";
    return out;
}

}  // namespace detail

inline std::string pretty_print(const circuit_program& prog) {
    std::string out;
    for (const auto& st : prog.statements) {
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, stmt_modes>) {
                    out += "MODES " + std::to_string(node.count);
                } else if constexpr (std::is_same_v<T, stmt_state> ||
                                     std::is_same_v<T, stmt_target>) {
                    out += std::is_same_v<T, stmt_state> ? "STATE" : "TARGET";
                    for (int m : node.modes) out += " " + std::to_string(m);
                    out += " =";
                    for (size_t i = 0; i < node.terms.size(); ++i)
                        out += (i == 0 ? " " : "") + detail::fmt_term(node.terms[i], i == 0);
                } else if constexpr (std::is_same_v<T, stmt_bps>) {
                    out += "BPS " + std::to_string(node.i) + " " + std::to_string(node.j);
                } else if constexpr (std::is_same_v<T, stmt_phase>) {
                    out += "PHASE " + std::to_string(node.mode) + " " + detail::fmt_num(node.psi);
                } else if constexpr (std::is_same_v<T, stmt_disp>) {
                    out += "DISP " + std::to_string(node.mode) + " " +
                           detail::fmt_num(node.beta.real()) + " " +
                           detail::fmt_num(node.beta.imag());
                } else if constexpr (std::is_same_v<T, stmt_measure>) {
                    out += "MEASURE " + std::to_string(node.mode) + " " + to_string(node.cls);
                }
            },
            st.node);
        out += "\n";
    }
    return out;
}

struct circuit_report {
    state_vector final_state;          // normalized state on the surviving modes
    double probability = 1.0;          // joint class probability of all MEASUREs
    std::vector<int> remaining_modes;  // original indices, ascending
    std::optional<double> target_fidelity;
};

inline circuit_report evaluate(const circuit_program& prog, double alpha) {
    const int n = prog.mode_count;

    // Assemble the initial product state in declaration order, then
    // permute to canonical mode order.
    std::vector<int> order;  // original mode of each tensor slot
    state_vector full = state_vector::scalar_one();
    const stmt_target* target = nullptr;

    for (const auto& st : prog.statements) {
        if (const auto* sp = std::get_if<stmt_state>(&st.node)) {
            state_vector sub(static_cast<int>(sp->modes.size()));
            for (const auto& t : sp->terms) {
                std::vector<cplx> labels;
                for (const auto& l : t.labels) labels.push_back(l.value(alpha));
                sub.push_term(t.coeff, std::move(labels));
            }
            full = tensor(full, normalize(canonicalize(sub)));
            order.insert(order.end(), sp->modes.begin(), sp->modes.end());
        }
    }
    for (int m = 0; m < n; ++m) {
        if (std::find(order.begin(), order.end(), m) == order.end()) {
            full = tensor(full, state_vector::coherent({cplx{0.0, 0.0}}));
            order.push_back(m);
        }
    }
    std::vector<int> slot_of(n);
    for (int slot = 0; slot < n; ++slot) slot_of[order[slot]] = slot;
    std::vector<int> perm(n);
    for (int m = 0; m < n; ++m) perm[m] = slot_of[m];
    full = permute_modes(full, perm);

    std::vector<int> measured_modes;
    detection_pattern pattern;
    for (const auto& st : prog.statements) {
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, stmt_bps>) {
                    full = apply_bps(full, node.i, node.j);
                } else if constexpr (std::is_same_v<T, stmt_phase>) {
                    full = apply_phase(full, node.mode, node.psi);
                } else if constexpr (std::is_same_v<T, stmt_disp>) {
                    full = apply_displacement(full, node.mode, node.beta);
                } else if constexpr (std::is_same_v<T, stmt_measure>) {
                    measured_modes.push_back(node.mode);
                    pattern.push_back(node.cls);
                } else if constexpr (std::is_same_v<T, stmt_target>) {
                    target = &node;
                }
            },
            st.node);
    }

    circuit_report rep;
    for (int m = 0; m < n; ++m)
        if (std::find(measured_modes.begin(), measured_modes.end(), m) == measured_modes.end())
            rep.remaining_modes.push_back(m);

    if (measured_modes.empty()) {
        rep.final_state = canonicalize(full);
        rep.probability = 1.0;
    } else {
        const herald_result h = herald_class(full, pattern, measured_modes);
        rep.final_state = h.state;
        rep.probability = h.probability;
    }

    if (target) {
        if (target->modes.size() != rep.remaining_modes.size())
            throw dimension_error("TARGET: mode set must match the surviving modes");
        // Reorder target labels to the surviving-mode order.
        state_vector tgt(static_cast<int>(target->modes.size()));
        for (const auto& t : target->terms) {
            std::vector<cplx> labels(t.labels.size());
            for (size_t k = 0; k < target->modes.size(); ++k) {
                auto it = std::find(rep.remaining_modes.begin(), rep.remaining_modes.end(),
                                    target->modes[k]);
                if (it == rep.remaining_modes.end())
                    throw dimension_error("TARGET: mode was measured away");
                labels[it - rep.remaining_modes.begin()] = t.labels[k].value(alpha);
            }
            tgt.push_term(t.coeff, std::move(labels));
        }
        rep.target_fidelity = fidelity(rep.final_state, normalize(canonicalize(tgt)));
    }
    return rep;
}

}  // namespace catsim::circuit
