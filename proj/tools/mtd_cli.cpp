// mtd: run MTD experiments, hindsight baselines, property checks and LP dumps.

#include "mtd/alp.hpp"
#include "mtd/experiment.hpp"
#include "mtd/io.hpp"
#include "mtd/lp.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct Selectors {
    std::string domain;
    std::string scenario = "web-evolving";
    std::vector<std::string> strategies{"ata-fmdp"};
    std::vector<double> alphas{1.0};
    int timesteps = 1000;
    int iterations = 10;
    std::uint64_t seed = 10;
    std::string start;
    std::string out;
    mtd::StrategyParams params;
    bool lowest_index_ties = false;
};

void add_selectors(CLI::App* cmd, Selectors& s, bool with_strategy) {
    cmd->add_option("--domain", s.domain, "web|network|web-3xsc|network-3xsc|web-dh-postgres or a domain JSON file");
    cmd->add_option("--scenario", s.scenario, "built-in scenario name or scenario JSON file")->capture_default_str();
    cmd->add_option("--alpha", s.alphas, "switching-cost weight(s)")->capture_default_str();
    cmd->add_option("--timesteps", s.timesteps, "steps per iteration")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--iterations", s.iterations, "iterations")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--seed", s.seed, "base seed; iteration i uses seed + i")->capture_default_str();
    cmd->add_option("--start", s.start, "start configuration label (default: first configuration)");
    cmd->add_option("--out", s.out, "output directory");
    if (!with_strategy) return;
    cmd->add_option("--strategy", s.strategies, "ata-fmdp|fpl|eps-greedy|urs|static:<label> (repeatable)")
        ->capture_default_str();
    cmd->add_option("--reopt-period", s.params.reopt_period, "re-optimize every n steps; 0 = only at t = 0")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--beta", s.params.beta, "estimator decay")->capture_default_str();
    cmd->add_option("--epsilon", s.params.epsilon, "eps-greedy exploration")->capture_default_str();
    cmd->add_option("--fpl-gamma", s.params.fpl_gamma, "FPL exploration rate")->capture_default_str();
    cmd->add_option("--fpl-eta", s.params.fpl_eta, "FPL perturbation rate")->capture_default_str();
    cmd->add_option("--fpl-lmax", s.params.fpl_lmax, "FPL resampling cap")->capture_default_str();
    cmd->add_flag("--lowest-index-ties", s.lowest_index_ties, "ATA-FMDP breaks ties by lowest action index");
}

mtd::ExperimentConfig make_config(const Selectors& s, const std::string& strategy, double alpha) {
    mtd::ExperimentConfig c;
    c.domain = s.domain;
    c.scenario = s.scenario;
    c.strategy = strategy;
    c.params = s.params;
    c.params.random_ties = !s.lowest_index_ties;
    c.alpha = alpha;
    c.timesteps = s.timesteps;
    c.iterations = s.iterations;
    c.seed = s.seed;
    if (!s.start.empty()) c.start_state = s.start;
    return c;
}

std::string combo_dir(const std::string& strategy, double alpha) {
    std::string name = strategy + "_alpha" + mtd::format_number(alpha);
    for (char& ch : name)
        if (ch == ':' || ch == '|' || ch == '/') ch = '-';
    return name;
}

int cmd_run(const Selectors& s) {
    std::vector<mtd::SummaryRow> rows;
    const bool single = s.strategies.size() == 1 && s.alphas.size() == 1;
    for (double alpha : s.alphas) {
        for (const auto& strategy : s.strategies) {
            const auto config = make_config(s, strategy, alpha);
            const auto inputs = mtd::resolve_inputs(config);
            const auto result = mtd::run_experiment(config, inputs);
            rows.push_back(mtd::summary_row(result));
            if (!s.out.empty()) {
                const std::filesystem::path dir =
                    single ? std::filesystem::path(s.out) : std::filesystem::path(s.out) / combo_dir(strategy, alpha);
                mtd::write_run_outputs(dir, config, inputs, result);
            }
        }
    }
    if (!s.out.empty() && !single) {
        std::ofstream f(std::filesystem::path(s.out) / "summary.csv", std::ios::binary);
        mtd::write_summary_csv(f, rows);
    }
    mtd::write_summary_csv(std::cout, rows);
    return 0;
}

int cmd_hindsight(const Selectors& s) {
    std::ostringstream csv;
    csv << "alpha,config,avg_reward,best,worst\n";
    for (double alpha : s.alphas) {
        auto config = make_config(s, "urs", alpha);
        const auto inputs = mtd::resolve_inputs(config);
        const auto h = mtd::hindsight_bounds(inputs.domain, inputs.scenario, inputs.start, inputs.scenario.horizon,
                                             config.iterations, config.seed);
        for (std::size_t c = 0; c < h.per_config.size(); ++c) {
            csv << mtd::format_number(alpha) << ',' << inputs.domain.space().label(mtd::Config{c}) << ','
                << mtd::format_number(h.per_config[c]) << ',' << (h.best_config.index == c ? 1 : 0) << ','
                << (h.worst_config.index == c ? 1 : 0) << '\n';
        }
    }
    std::cout << csv.str();
    if (!s.out.empty()) {
        std::filesystem::create_directories(s.out);
        std::ofstream f(std::filesystem::path(s.out) / "hindsight.csv", std::ios::binary);
        f << csv.str();
    }
    return 0;
}

int cmd_verify(std::uint64_t seed) {
    bool all = true;
    for (const auto& c : mtd::run_property_checks(seed)) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        all = all && c.pass;
    }
    return all ? 0 : 1;
}

int cmd_dump_lp(const std::string& domain_name, std::uint64_t seed, const std::string& posterior_spec,
                const std::string& basis_kind, double alpha, const std::string& out) {
    mtd::ExperimentConfig config;
    config.domain = domain_name.empty() ? "web" : domain_name;
    config.scenario = config.domain.rfind("network", 0) == 0 ? "net-evolving" : "web-evolving";
    config.seed = seed;
    config.alpha = alpha;
    const auto inputs = mtd::resolve_inputs(config);
    const auto& domain = inputs.domain;

    mtd::PosteriorTable posterior =
        mtd::posterior_snapshot(mtd::ThreatEstimator(domain.type_count(), domain.space().size(), 2.0), domain);
    if (!posterior_spec.empty()) {
        // "MH=0.5,DH=0.35,unknown=0.15"
        mtd::TypeDistribution dist(domain.type_count(), 0.0);
        std::stringstream ss(posterior_spec);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("posterior entries look like type=p");
            dist[domain.type_index(item.substr(0, eq))] = std::stod(item.substr(eq + 1));
        }
        posterior = mtd::PosteriorTable::uniform_over(domain, dist);
    }
    const auto basis = basis_kind == "state" ? mtd::build_state_basis(domain.space()) : mtd::build_basis(domain.space());
    const auto text = mtd::alp_to_json(mtd::build_alp(domain, posterior, basis), domain);
    if (out.empty()) {
        std::cout << text << '\n';
    } else {
        std::ofstream f(out, std::ios::binary);
        f << text << '\n';
    }
    return 0;
}

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const mtd::ScenarioError*>(&e)) return "scenario";
    if (dynamic_cast<const mtd::AlpError*>(&e)) return "alp";
    if (dynamic_cast<const mtd::DomainError*>(&e)) return "domain";
    if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid_argument";
    return "runtime";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Moving-target-defense experiment toolkit"};
    app.require_subcommand(1);

    Selectors run_sel;
    auto* run = app.add_subcommand("run", "run strategies on a scenario and write step/summary CSVs");
    add_selectors(run, run_sel, true);

    Selectors hs_sel;
    auto* hindsight = app.add_subcommand("hindsight", "best and worst static defenses in hindsight");
    add_selectors(hindsight, hs_sel, false);

    std::uint64_t verify_seed = 10;
    auto* verify = app.add_subcommand("verify", "run the property-check suite");
    verify->add_option("--seed", verify_seed, "seed")->capture_default_str();

    std::string lp_domain, lp_posterior, lp_basis = "factored", lp_out;
    std::uint64_t lp_seed = 10;
    double lp_alpha = 1.0;
    auto* dump = app.add_subcommand("dump-lp", "print the assembled approximate LP as JSON");
    dump->add_option("--domain", lp_domain, "built-in domain name or domain JSON file");
    dump->add_option("--seed", lp_seed, "seed for randomly drawn domains")->capture_default_str();
    dump->add_option("--alpha", lp_alpha, "switching-cost weight")->capture_default_str();
    dump->add_option("--posterior", lp_posterior, "global type distribution, e.g. MH=0.5,DH=0.35,unknown=0.15");
    dump->add_option("--basis", lp_basis, "factored|state")->check(CLI::IsMember({"factored", "state"}));
    dump->add_option("--out", lp_out, "output file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(run_sel);
        if (*hindsight) return cmd_hindsight(hs_sel);
        if (*verify) return cmd_verify(verify_seed);
        if (*dump) return cmd_dump_lp(lp_domain, lp_seed, lp_posterior, lp_basis, lp_alpha, lp_out);
    } catch (const std::exception& e) {
        nlohmann::json err = {{"error", error_kind(e)}, {"message", e.what()}};
        std::cerr << err.dump() << '\n';
        return 2;
    }
    return 0;
}
