#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "catsim/fock.hpp"
#include "catsim/protocol.hpp"
#include "catsim/reference.hpp"

// Scenario configuration plus the dataset builders behind the command
// line front end. Everything here is deterministic: fixed iteration
// order, '.' decimal separator, 17 significant digits, LF line endings.
namespace catsim::cli {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline uint64_t fnv1a(std::string_view s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct oracle_config {
    int cutoff = 0;  // 0: derive from alpha
    double eps = 1e-10;
};

struct scenario_config {
    double alpha = 1.0;
    double theta = 0.3;
    double phi = 0.9;
    double theta1 = 0.7;
    bool explicit_amps = false;
    std::array<cplx, 4> amps_a{};
    std::array<cplx, 2> amps_b{};

    std::vector<double> sweep_theta;
    std::vector<double> sweep_phi;
    std::vector<double> sweep_theta1;
    std::vector<double> sweep_alpha;
    std::vector<std::string> quantities;

    std::string format = "csv";  // csv | json | markdown
    std::string output;          // empty: stdout
    oracle_config oracle;

    abqt::alice_info alice() const {
        return explicit_amps ? abqt::alice_info(amps_a) : abqt::alice_info::from_angles(theta, phi);
    }
    abqt::bob_info bob() const {
        return explicit_amps ? abqt::bob_info(amps_b) : abqt::bob_info::from_angle(theta1);
    }
    abqt::channel_spec spec() const { return abqt::channel_spec(alpha); }
    int cutoff() const { return oracle.cutoff > 0 ? oracle.cutoff : fock::default_cutoff(alpha); }

    void validate() const {
        if (!(alpha > 0.0)) throw precondition_error("config.alpha: must be positive");
        if (format != "csv" && format != "json" && format != "markdown")
            throw precondition_error("config.format: must be csv, json or markdown");
        if (oracle.eps <= 0.0) throw precondition_error("config.oracle.eps: must be positive");
        if (oracle.cutoff < 0) throw precondition_error("config.oracle.cutoff: must be positive");
    }
};

namespace detail {

inline std::vector<double> grid_from_json(const nlohmann::json& j, const std::string& field) {
    std::vector<double> out;
    if (j.is_array()) {
        for (const auto& v : j) out.push_back(v.get<double>());
    } else if (j.is_object()) {
        const double lo = j.at("min").get<double>();
        const double hi = j.at("max").get<double>();
        const int count = j.at("count").get<int>();
        if (count < 1) throw precondition_error("config.sweep." + field + ".count: must be >= 1");
        for (int i = 0; i < count; ++i)
            out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    } else {
        throw precondition_error("config.sweep." + field + ": expected array or {min,max,count}");
    }
    if (out.empty()) throw precondition_error("config.sweep." + field + ": empty grid");
    return out;
}

inline cplx amp_from_json(const nlohmann::json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    throw precondition_error("config amplitude: expected number or [re, im]");
}

}  // namespace detail

inline scenario_config config_from_json(const nlohmann::json& j) {
    scenario_config cfg;
    if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
    if (j.contains("theta")) cfg.theta = j["theta"].get<double>();
    if (j.contains("phi")) cfg.phi = j["phi"].get<double>();
    if (j.contains("theta1")) cfg.theta1 = j["theta1"].get<double>();
    if (j.contains("a") || j.contains("b")) {
        if (!j.contains("a") || !j.contains("b"))
            throw precondition_error("config: explicit amplitudes need both \"a\" and \"b\"");
        if (j["a"].size() != 4 || j["b"].size() != 2)
            throw precondition_error("config: \"a\" takes 4 entries, \"b\" takes 2");
        cfg.explicit_amps = true;
        for (int i = 0; i < 4; ++i) cfg.amps_a[i] = detail::amp_from_json(j["a"][i]);
        for (int i = 0; i < 2; ++i) cfg.amps_b[i] = detail::amp_from_json(j["b"][i]);
    }
    if (j.contains("sweep")) {
        const auto& sw = j["sweep"];
        if (sw.contains("theta")) cfg.sweep_theta = detail::grid_from_json(sw["theta"], "theta");
        if (sw.contains("phi")) cfg.sweep_phi = detail::grid_from_json(sw["phi"], "phi");
        if (sw.contains("theta1")) cfg.sweep_theta1 = detail::grid_from_json(sw["theta1"], "theta1");
        if (sw.contains("alpha")) cfg.sweep_alpha = detail::grid_from_json(sw["alpha"], "alpha");
    }
    if (j.contains("quantities"))
        for (const auto& q : j["quantities"]) cfg.quantities.push_back(q.get<std::string>());
    if (j.contains("format")) cfg.format = j["format"].get<std::string>();
    if (j.contains("output")) cfg.output = j["output"].get<std::string>();
    if (j.contains("oracle")) {
        if (j["oracle"].contains("cutoff")) cfg.oracle.cutoff = j["oracle"]["cutoff"].get<int>();
        if (j["oracle"].contains("eps")) cfg.oracle.eps = j["oracle"]["eps"].get<double>();
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// run: the per-outcome table

struct run_dataset {
    std::vector<abqt::protocol_outcome> outcomes;
    abqt::success_summary summary;
};

inline run_dataset build_run(const scenario_config& cfg) {
    run_dataset ds;
    ds.outcomes = abqt::enumerate_outcomes(cfg.alice(), cfg.bob(), cfg.spec());
    ds.summary = abqt::total_success_probability(cfg.alice(), cfg.bob(), cfg.spec());
    return ds;
}

inline std::string pattern_string(const detection_pattern& p) {
    std::string s;
    for (size_t i = 0; i < p.size(); ++i) {
        if (i) s += "|";
        s += to_string(p[i]);
    }
    return s;
}

inline std::string render_run_csv(const run_dataset& ds) {
    std::string out = "pattern,case,row,probability,f_ab,f_ba,class_ab,class_ba\n";
    for (const auto& o : ds.outcomes) {
        out += pattern_string(o.pattern);
        out += ",";
        out += abqt::to_string(o.kase);
        out += "," + std::to_string(o.row) + "," + fmt(o.probability);
        if (o.corrected) {
            out += "," + fmt(o.corrected->f_ab) + "," + fmt(o.corrected->f_ba);
            out += o.corrected->faithful_ab ? ",F" : ",NF";
            out += o.corrected->faithful_ba ? ",F" : ",NF";
        } else {
            out += ",,,,";
        }
        out += "\n";
    }
    out += "# faithful_total," + fmt(ds.summary.faithful_total) + "\n";
    out += "# row_total," + fmt(ds.summary.row_total) + "\n";
    out += "# ambiguous_mass," + fmt(ds.summary.ambiguous_mass) + "\n";
    return out;
}

inline nlohmann::json run_to_json(const run_dataset& ds) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& o : ds.outcomes) {
        nlohmann::json r;
        r["pattern"] = pattern_string(o.pattern);
        r["case"] = abqt::to_string(o.kase);
        r["row"] = o.row;
        r["probability"] = o.probability;
        if (o.corrected) {
            r["f_ab"] = o.corrected->f_ab;
            r["f_ba"] = o.corrected->f_ba;
            r["class_ab"] = o.corrected->faithful_ab ? "F" : "NF";
            r["class_ba"] = o.corrected->faithful_ba ? "F" : "NF";
        }
        rows.push_back(std::move(r));
    }
    nlohmann::json j;
    j["outcomes"] = std::move(rows);
    j["faithful_total"] = ds.summary.faithful_total;
    j["row_total"] = ds.summary.row_total;
    j["ambiguous_mass"] = ds.summary.ambiguous_mass;
    return j;
}

inline std::string render_run_markdown(const run_dataset& ds) {
    std::string out =
        "| pattern | case | row | probability | f_ab | f_ba | A->B | B->A |\n"
        "|---|---|---|---|---|---|---|---|\n";
    for (const auto& o : ds.outcomes) {
        out += "| " + pattern_string(o.pattern) + " | " + abqt::to_string(o.kase) + " | " +
               std::to_string(o.row) + " | " + fmt(o.probability);
        if (o.corrected)
            out += " | " + fmt(o.corrected->f_ab) + " | " + fmt(o.corrected->f_ba) + " | " +
                   (o.corrected->faithful_ab ? "F" : "NF") + " | " +
                   (o.corrected->faithful_ba ? "F" : "NF") + " |\n";
        else
            out += " | | | | |\n";
    }
    out += "\nfaithful_total " + fmt(ds.summary.faithful_total) + ", row_total " +
           fmt(ds.summary.row_total) + ", ambiguous_mass " + fmt(ds.summary.ambiguous_mass) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// sweep: long-format datasets over parameter grids

inline const std::vector<std::string>& default_quantities() {
    static const std::vector<std::string> q = {"f1_ab", "f3_ab", "f4_ab", "f_av_ab", "f_av_ba"};
    return q;
}

// One grid point: every requested quantity from a single enumeration.
inline std::map<std::string, double> point_quantities(double theta, double phi, double theta1,
                                                      double alpha,
                                                      const std::vector<std::string>& wanted) {
    const auto alice = abqt::alice_info::from_angles(theta, phi);
    const auto bob = abqt::bob_info::from_angle(theta1);
    const abqt::channel_spec spec(alpha);
    const auto rows = abqt::enumerate_row_outcomes(alice, bob, spec);

    auto case1_row = [&](int r) -> const abqt::protocol_outcome& {
        for (const auto& o : rows)
            if (o.kase == abqt::case_id::i && o.row == r) return o;
        throw precondition_error("point_quantities: missing row");
    };

    std::map<std::string, double> out;
    for (const auto& q : wanted) {
        if (q == "f_av_ab" || q == "f_av_ba") {
            double ab = 0.0, ba = 0.0;
            for (const auto& o : rows) {
                ab += o.probability * o.corrected->f_ab;
                ba += o.probability * o.corrected->f_ba;
            }
            out[q] = q == "f_av_ab" ? ab : ba;
            continue;
        }
        if (q == "p_faithful") {
            double p = 0.0;
            for (const auto& o : rows)
                if (o.row == 5) p += o.probability;
            out[q] = p;
            continue;
        }
        if (q.size() >= 5 && q[0] == 'f' && q[1] >= '1' && q[1] <= '8') {
            const int r = q[1] - '0';
            const auto& o = case1_row(r);
            if (q.substr(2) == "_ab") { out[q] = o.corrected->f_ab; continue; }
            if (q.substr(2) == "_ba") { out[q] = o.corrected->f_ba; continue; }
            if (q.substr(2) == "_p") { out[q] = o.probability; continue; }
        }
        throw precondition_error("config.quantities: unknown quantity '" + q + "'");
    }
    return out;
}

inline std::string sweep_csv(const scenario_config& cfg) {
    const std::vector<double> thetas =
        cfg.sweep_theta.empty() ? std::vector<double>{cfg.theta} : cfg.sweep_theta;
    const std::vector<double> phis =
        cfg.sweep_phi.empty() ? std::vector<double>{cfg.phi} : cfg.sweep_phi;
    const std::vector<double> theta1s =
        cfg.sweep_theta1.empty() ? std::vector<double>{cfg.theta1} : cfg.sweep_theta1;
    const std::vector<double> alphas =
        cfg.sweep_alpha.empty() ? std::vector<double>{cfg.alpha} : cfg.sweep_alpha;
    const std::vector<std::string>& wanted =
        cfg.quantities.empty() ? default_quantities() : cfg.quantities;

    std::string out = "theta,phi,theta1,alpha,quantity,value\n";
    for (double a : alphas) {
        for (double t : thetas) {
            for (double ph : phis) {
                for (double t1 : theta1s) {
                    const auto vals = point_quantities(t, ph, t1, a, wanted);
                    for (const auto& q : wanted) {
                        out += fmt(t) + "," + fmt(ph) + "," + fmt(t1) + "," + fmt(a) + "," + q +
                               "," + fmt(vals.at(q)) + "\n";
                    }
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// tables: the eight case tables, generated from the engine

struct rendered_row {
    int kase = 0;
    int row = 0;
    std::array<std::string, 3> parity;
    std::string state_expr;
    std::string alice_op;
    std::string bob_op;
    std::string tag;  // "<A->B>/<B->A>"
};

namespace detail {

inline std::string op_string(const std::vector<gate_spec>& ops, int identity_mode) {
    if (ops.empty()) return "I_" + std::to_string(identity_mode);
    std::string s;
    // Application order is P then D; print composition right-to-left.
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        if (!s.empty()) s += " ";
        s += (it->kind == gate_kind::phase ? "P_" : "D_") + std::to_string(it->mode_a);
    }
    return s;
}

inline std::string sign_str(int s) { return s > 0 ? "+" : "-"; }

}  // namespace detail

// Regenerate the 64 rows from the engine at fixed generic parameters.
// Sign structure is extracted numerically from the heralded states, so
// any engine regression shows up as a table diff.
inline std::vector<rendered_row> build_tables() {
    const auto alice = abqt::alice_info::from_angles(0.3, 0.9);
    const auto bob = abqt::bob_info::from_angle(0.7);
    const abqt::channel_spec spec(1.0);
    const auto rows = abqt::enumerate_row_outcomes(alice, bob, spec);

    std::vector<rendered_row> out;
    for (const auto& o : rows) {
        rendered_row r;
        r.kase = static_cast<int>(o.kase);
        r.row = o.row;
        for (int p = 0; p < 3; ++p) r.parity[p] = o.odd_parity[p] ? "Odd" : "Even";

        // Locate the reference term (alice index 0, bob index 0) and
        // derive every term's sign relative to it.
        const auto flips = abqt::case_flip(o.kase);
        auto term_ids = [&](const coherent_term& t) {
            const int s4 = t.labels[0].real() > 0 ? 1 : -1;
            const int s5 = t.labels[1].real() > 0 ? 1 : -1;
            const int s6 = t.labels[2].real() > 0 ? 1 : -1;
            const int b4 = flips[0] ? -s4 : s4;
            const int b5 = flips[1] ? -s5 : s5;
            const int b6 = flips[2] ? -s6 : s6;
            const int ia = (b4 > 0 ? 0 : 2) + (b5 > 0 ? 0 : 1);
            const int ib = b6 > 0 ? 0 : 1;
            return std::array<int, 2>{ia, ib};
        };
        cplx ref{0.0, 0.0};
        for (const auto& t : o.heralded.terms()) {
            const auto id = term_ids(t);
            if (id[0] == 0 && id[1] == 0)
                ref = t.coeff / (alice.a[0] * bob.b[0]);
        }
        std::array<int, 4> sign_a{0, 0, 0, 0};
        std::array<int, 2> sign_b{0, 0};
        for (const auto& t : o.heralded.terms()) {
            const auto id = term_ids(t);
            const cplx rel = t.coeff / (ref * alice.a[id[0]] * bob.b[id[1]]);
            const int s = rel.real() > 0 ? 1 : -1;
            if (id[1] == 0) sign_a[id[0]] = s;
            if (id[0] == 0) sign_b[id[1]] = s;
        }

        auto lbl = [&](int base_sign, bool flip) {
            const int s = flip ? -base_sign : base_sign;
            return s > 0 ? std::string("a") : std::string("-a");
        };
        std::string expr = "N(";
        static constexpr std::array<std::array<int, 2>, 4> base{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
        for (int i = 0; i < 4; ++i) {
            if (i) expr += " " + detail::sign_str(sign_a[i]) + " ";
            else if (sign_a[i] < 0) expr += "-";
            expr += "A" + std::to_string(i) + "|" + lbl(base[i][0], flips[0]) + "," +
                    lbl(base[i][1], flips[1]) + ">";
        }
        expr += ")_45 x N(";
        for (int j = 0; j < 2; ++j) {
            if (j) expr += " " + detail::sign_str(sign_b[j]) + " ";
            else if (sign_b[j] < 0) expr += "-";
            expr += "B" + std::to_string(j) + "|" + lbl(1 - 2 * j, flips[2]) + ">";
        }
        expr += ")_6";
        r.state_expr = expr;

        r.alice_op = detail::op_string(o.corrected->plan.alice_ops, 6);
        r.bob_op = detail::op_string(o.corrected->plan.bob_ops, 5);
        if (o.corrected->plan.bob_ops.empty()) r.bob_op = "I_5 I_4";
        r.tag = std::string(o.corrected->faithful_ab ? "F" : "NF") + "/" +
                (o.corrected->faithful_ba ? "F" : "NF");
        out.push_back(std::move(r));
    }
    return out;
}

inline std::string render_tables_markdown(const std::vector<rendered_row>& rows) {
    std::string out;
    for (int c = 1; c <= 8; ++c) {
        out += "## Case ";
        out += abqt::to_string(static_cast<abqt::case_id>(c));
        out +=
            "\n\n| pair 1 | pair 2 | pair 3 | heralded state | Alice op | Bob op | A->B / B->A "
            "|\n|---|---|---|---|---|---|---|\n";
        for (int r = 1; r <= 8; ++r) {
            for (const auto& row : rows) {
                if (row.kase != c || row.row != r) continue;
                out += "| " + row.parity[0] + " | " + row.parity[1] + " | " + row.parity[2] +
                       " | " + row.state_expr + " | " + row.alice_op + " | " + row.bob_op + " | " +
                       row.tag + " |\n";
            }
        }
        out += "\n";
    }
    return out;
}

inline nlohmann::json tables_to_json(const std::vector<rendered_row>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j;
        j["case"] = abqt::to_string(static_cast<abqt::case_id>(r.kase));
        j["row"] = r.row;
        j["parities"] = {r.parity[0], r.parity[1], r.parity[2]};
        j["state"] = r.state_expr;
        j["alice_op"] = r.alice_op;
        j["bob_op"] = r.bob_op;
        j["tag"] = r.tag;
        out.push_back(std::move(j));
    }
    return out;
}

}  // namespace catsim::cli
