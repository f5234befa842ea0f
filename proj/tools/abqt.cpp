// Command line front end for the asymmetric bidirectional teleportation
// engine: per-outcome tables, parameter sweeps, generated case tables,
// oracle verification and a small circuit interpreter.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "catsim/circuit.hpp"
#include "catsim/fock.hpp"
#include "catsim/sweep.hpp"

namespace {

using namespace catsim;

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_verify_failed = 2;
constexpr int exit_invariant = 3;

void emit(const std::string& text, const std::string& output) {
    if (output.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream f(output, std::ios::binary);
    if (!f) throw precondition_error("cannot open output file: " + output);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::vector<double> parse_grid(const std::string& text) {
    // "min:max:count" or a comma-separated list
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        double lo = 0.0, hi = 0.0;
        int count = 0;
        if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 1)
            throw precondition_error("grid: expected min:max:count, got '" + text + "'");
        for (int i = 0; i < count; ++i)
            out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw precondition_error("grid: empty list");
    return out;
}

struct cli_options {
    std::string config_path;
    double alpha = -1.0;
    double theta = -1e300, phi = -1e300, theta1 = -1e300;
    std::vector<double> a_amps, b_amps;
    std::string format, output;
    std::string grid_theta, grid_phi, grid_theta1, grid_alpha;
    std::vector<std::string> quantities;
    int cutoff = -1;
    double eps = -1.0;
};

cli::scenario_config resolve_config(const cli_options& opt) {
    cli::scenario_config cfg;
    if (!opt.config_path.empty()) {
        std::ifstream f(opt.config_path);
        if (!f) throw precondition_error("cannot open config file: " + opt.config_path);
        nlohmann::json j;
        try {
            f >> j;
        } catch (const nlohmann::json::exception& e) {
            throw precondition_error(std::string("config: ") + e.what());
        }
        cfg = cli::config_from_json(j);
    }
    if (opt.alpha > 0.0) cfg.alpha = opt.alpha;
    if (opt.theta > -1e299) cfg.theta = opt.theta;
    if (opt.phi > -1e299) cfg.phi = opt.phi;
    if (opt.theta1 > -1e299) cfg.theta1 = opt.theta1;
    if (!opt.a_amps.empty() || !opt.b_amps.empty()) {
        if (opt.a_amps.size() != 4 || opt.b_amps.size() != 2)
            throw precondition_error("--a takes 4 values and --b takes 2");
        cfg.explicit_amps = true;
        for (int i = 0; i < 4; ++i) cfg.amps_a[i] = cplx{opt.a_amps[i], 0.0};
        for (int i = 0; i < 2; ++i) cfg.amps_b[i] = cplx{opt.b_amps[i], 0.0};
    }
    if (!opt.format.empty()) cfg.format = opt.format;
    if (!opt.output.empty()) cfg.output = opt.output;
    if (!opt.grid_theta.empty()) cfg.sweep_theta = parse_grid(opt.grid_theta);
    if (!opt.grid_phi.empty()) cfg.sweep_phi = parse_grid(opt.grid_phi);
    if (!opt.grid_theta1.empty()) cfg.sweep_theta1 = parse_grid(opt.grid_theta1);
    if (!opt.grid_alpha.empty()) cfg.sweep_alpha = parse_grid(opt.grid_alpha);
    if (!opt.quantities.empty()) cfg.quantities = opt.quantities;
    if (opt.cutoff >= 0) cfg.oracle.cutoff = opt.cutoff;
    if (opt.eps > 0.0) cfg.oracle.eps = opt.eps;
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* cmd, cli_options& opt) {
    cmd->add_option("--config", opt.config_path, "JSON config file (flags override it)");
    cmd->add_option("--alpha", opt.alpha, "coherent amplitude");
    cmd->add_option("--theta", opt.theta, "first information angle");
    cmd->add_option("--phi", opt.phi, "second information angle");
    cmd->add_option("--theta1", opt.theta1, "cat-state angle");
    cmd->add_option("--a", opt.a_amps, "explicit four information amplitudes")->expected(4);
    cmd->add_option("--b", opt.b_amps, "explicit two cat amplitudes")->expected(2);
    cmd->add_option("--format", opt.format, "csv, json or markdown");
    cmd->add_option("--output,-o", opt.output, "output path (default stdout)");
}

int cmd_run(const cli_options& opt) {
    const auto cfg = resolve_config(opt);
    const auto ds = cli::build_run(cfg);
    if (cfg.format == "json")
        emit(cli::run_to_json(ds).dump(2) + "\n", cfg.output);
    else if (cfg.format == "markdown")
        emit(cli::render_run_markdown(ds), cfg.output);
    else
        emit(cli::render_run_csv(ds), cfg.output);
    return exit_ok;
}

int cmd_sweep(const cli_options& opt) {
    auto cfg = resolve_config(opt);
    if (cfg.format != "csv" && cfg.format != "json")
        throw precondition_error("sweep: format must be csv or json");
    const std::string csv = cli::sweep_csv(cfg);
    if (cfg.format == "json") {
        nlohmann::json rows = nlohmann::json::array();
        std::stringstream ss(csv);
        std::string line;
        std::getline(ss, line);  // header
        while (std::getline(ss, line)) {
            std::stringstream ls(line);
            std::string t, p, t1, a, q, v;
            std::getline(ls, t, ',');
            std::getline(ls, p, ',');
            std::getline(ls, t1, ',');
            std::getline(ls, a, ',');
            std::getline(ls, q, ',');
            std::getline(ls, v, ',');
            rows.push_back({{"theta", std::stod(t)},
                            {"phi", std::stod(p)},
                            {"theta1", std::stod(t1)},
                            {"alpha", std::stod(a)},
                            {"quantity", q},
                            {"value", std::stod(v)}});
        }
        emit(rows.dump(2) + "\n", cfg.output);
    } else {
        emit(csv, cfg.output);
    }
    return exit_ok;
}

int cmd_tables(const cli_options& opt) {
    const auto cfg = resolve_config(opt);
    const auto rows = cli::build_tables();
    if (cfg.format == "json")
        emit(cli::tables_to_json(rows).dump(2) + "\n", cfg.output);
    else
        emit(cli::render_tables_markdown(rows), cfg.output);
    return exit_ok;
}

int cmd_verify(const cli_options& opt) {
    const auto cfg = resolve_config(opt);
    fock::verify_report rep;
    try {
        rep = fock::cross_check(cfg.alice(), cfg.bob(), cfg.spec(), cfg.cutoff(), cfg.oracle.eps);
    } catch (const cutoff_error& e) {
        std::cerr << "verify: " << e.what() << " (suggested cutoff " << e.suggested_cutoff
                  << ")\n";
        return exit_validation;
    }
    std::string out;
    out += "gate_deviation           " + cli::fmt(rep.gate_deviation) + "\n";
    out += "pair_marginal_deviation  " + cli::fmt(rep.pair_marginal_deviation) + "\n";
    out += "row_probability_deviation " + cli::fmt(rep.row_probability_deviation) + "\n";
    out += "heralded_state_deviation " + cli::fmt(rep.heralded_state_deviation) + "\n";
    out += "partition_deficit        " + cli::fmt(rep.partition_deficit) + "\n";
    out += std::string("result                   ") + (rep.pass() ? "PASS" : "FAIL") + " at " +
           cli::fmt(rep.tolerance) + "\n";
    emit(out, cfg.output);
    return rep.pass() ? exit_ok : exit_verify_failed;
}

int cmd_circuit(const std::string& path, const cli_options& opt) {
    const auto cfg = resolve_config(opt);
    std::ifstream f(path);
    if (!f) {
        std::cerr << "circuit: cannot open " << path << "\n";
        return exit_validation;
    }
    std::stringstream buf;
    buf << f.rdbuf();
    const auto parsed = circuit::parse_circuit(buf.str());
    if (!parsed.ok()) {
        for (const auto& d : parsed.diagnostics)
            std::cerr << path << ":" << d.loc.line << ":" << d.loc.col << ": " << d.message
                      << "\n";
        return exit_validation;
    }
    circuit::circuit_report rep;
    try {
        rep = circuit::evaluate(*parsed.program, cfg.alpha);
    } catch (const std::exception& e) {
        std::cerr << "circuit: " << e.what() << "\n";
        return exit_validation;
    }
    nlohmann::json j;
    j["probability"] = rep.probability;
    j["remaining_modes"] = rep.remaining_modes;
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : rep.final_state.terms()) {
        nlohmann::json labels = nlohmann::json::array();
        for (cplx l : t.labels) labels.push_back({l.real(), l.imag()});
        terms.push_back({{"coeff", {t.coeff.real(), t.coeff.imag()}}, {"labels", labels}});
    }
    j["state"] = std::move(terms);
    if (rep.target_fidelity) j["target_fidelity"] = *rep.target_fidelity;
    emit(j.dump(2) + "\n", cfg.output);
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"linear-optical teleportation simulator over coherent-state superpositions"};
    app.require_subcommand(1);

    cli_options opt;
    std::string circuit_path;

    auto* run = app.add_subcommand("run", "per-outcome table at one parameter point");
    add_common(run, opt);

    auto* sweep = app.add_subcommand("sweep", "long-format dataset over parameter grids");
    add_common(sweep, opt);
    sweep->add_option("--grid-theta", opt.grid_theta, "min:max:count or comma list");
    sweep->add_option("--grid-phi", opt.grid_phi, "min:max:count or comma list");
    sweep->add_option("--grid-theta1", opt.grid_theta1, "min:max:count or comma list");
    sweep->add_option("--grid-alpha", opt.grid_alpha, "min:max:count or comma list");
    sweep->add_option("--quantity", opt.quantities, "quantities to emit (repeatable)");

    auto* tables = app.add_subcommand("tables", "generated case tables for all 64 rows");
    add_common(tables, opt);

    auto* verify = app.add_subcommand("verify", "cross-check the engine against the Fock oracle");
    add_common(verify, opt);
    verify->add_option("--cutoff", opt.cutoff, "photon-number truncation (default from alpha)");
    verify->add_option("--eps", opt.eps, "tail-mass tolerance");

    auto* circuit_cmd = app.add_subcommand("circuit", "parse and evaluate a wiring file");
    add_common(circuit_cmd, opt);
    circuit_cmd->add_option("file", circuit_path, "circuit source file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_validation;
    }

    try {
        if (run->parsed()) return cmd_run(opt);
        if (sweep->parsed()) return cmd_sweep(opt);
        if (tables->parsed()) return cmd_tables(opt);
        if (verify->parsed()) return cmd_verify(opt);
        if (circuit_cmd->parsed()) return cmd_circuit(circuit_path, opt);
    } catch (const precondition_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const dimension_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const cutoff_error& e) {
        std::cerr << "error: " << e.what() << " (suggested cutoff " << e.suggested_cutoff << ")\n";
        return exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_invariant;
    }
    return exit_validation;
}
