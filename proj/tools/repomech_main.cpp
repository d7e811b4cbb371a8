#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "repomech/repomech.hpp"

namespace {

using namespace repomech;

struct CommonOptions {
    std::string input;
    std::string policy = "ascending";
    std::string end_nodes = "secured";
    std::string fmv_adjust = "0";
    std::string output_dir;
    std::string scenario_path;
    std::optional<std::string> capital;
    std::string assets = "0";
    std::string exposures = "0";
    std::string slr_floor = "0.05";
    std::optional<std::string> ccp_fee;
    std::optional<std::string> p_t;
};

void add_book_options(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--input", opt.input, "book file (.csv or .json)")->required();
    cmd->add_option("--policy", opt.policy,
                    "split policy: 'ascending' or 'explicit:<assignment.json>'");
    cmd->add_option("--end-node-policy", opt.end_nodes,
                    "end-node accounting: 'secured' or 'final-sale'");
    cmd->add_option("--fmv-adjust", opt.fmv_adjust, "additive FMV credit adjustment");
    cmd->add_option("--output-dir", opt.output_dir,
                    "directory for report files (default: REPOMECH_OUTPUT_DIR or stdout only)");
}

PipelineConfig make_config(const CommonOptions& opt) {
    PipelineConfig config;
    if (opt.policy == "ascending") {
        config.policy = SplitPolicy::ascending();
    } else if (opt.policy.rfind("explicit:", 0) == 0) {
        const std::string path = opt.policy.substr(9);
        config.policy =
            SplitPolicy::explicit_from(parse_assignment_json(read_file(path)));
    } else {
        raise(Errc::bad_config, "unknown policy '" + opt.policy + "'");
    }
    if (opt.end_nodes == "secured")
        config.end_node_policy = EndNodePolicy::secured_financing;
    else if (opt.end_nodes == "final-sale")
        config.end_node_policy = EndNodePolicy::final_sale_derivative;
    else
        raise(Errc::bad_config, "unknown end-node policy '" + opt.end_nodes + "'");
    config.fmv_adjustment = Money::parse(opt.fmv_adjust);
    if (opt.capital) {
        SlrState slr;
        slr.capital = Money::parse(*opt.capital);
        slr.assets = Money::parse(opt.assets);
        slr.exposures = Money::parse(opt.exposures);
        slr.floor = Money::parse(opt.slr_floor);
        config.slr = slr;
    }
    if (opt.ccp_fee) config.ccp_fee_per_unit = Money::parse(*opt.ccp_fee);
    if (opt.p_t) config.p_t_mark = Money::parse(*opt.p_t);
    if (!opt.scenario_path.empty())
        config.scenario = parse_scenario_json(read_file(opt.scenario_path));
    return config;
}

std::string resolve_output_dir(const CommonOptions& opt) {
    if (!opt.output_dir.empty()) return opt.output_dir;
    if (const char* env = std::getenv("REPOMECH_OUTPUT_DIR"); env && *env) return env;
    return "";
}

void emit(const CommonOptions& opt, const std::map<std::string, std::string>& files,
          const std::string& stdout_file) {
    const std::string dir = resolve_output_dir(opt);
    if (!dir.empty()) {
        std::filesystem::create_directories(dir);
        for (const auto& [name, content] : files)
            write_file((std::filesystem::path(dir) / name).string(), content);
        std::cout << "wrote " << files.size() << " files to " << dir << "\n";
    }
    const auto it = files.find(stdout_file);
    if (dir.empty() && it != files.end()) std::cout << it->second;
}

PipelineResult load_and_run(const CommonOptions& opt, const PipelineConfig& config) {
    return run_pipeline(load_book(opt.input), config);
}

int run_econ(const std::string& out_dir, const econ::DealerParams& dealer,
             const econ::HedgeFundParams& hedge, double alpha_hi, int samples,
             std::optional<double> sensitivity_dl) {
    std::string curves = "r,supply,supply_slope,demand,demand_slope\n";
    const double r_lo = std::min(dealer.demand.r0, 0.0);
    const double r_hi = std::max(alpha_hi, dealer.r_int);
    for (int i = 0; i <= samples; ++i) {
        const double r = r_lo + (r_hi - r_lo) * i / samples;
        char line[256];
        std::snprintf(line, sizeof line, "%.10g,%.10g,%.10g,%.10g,%.10g\n", r,
                      econ::hedge_fund_supply(r, hedge), econ::hedge_fund_supply_slope(r, hedge),
                      econ::mmf_demand(r, dealer.demand), econ::mmf_demand_slope(r, dealer.demand));
        curves += line;
    }
    const econ::DealerOptimum opt = econ::dealer_optimal_rate(dealer);
    std::string trace = "r_star,volume,constrained,profit\n";
    {
        char line[256];
        std::snprintf(line, sizeof line, "%.12g,%.12g,%d,%.12g\n", opt.r_star, opt.volume,
                      opt.constrained ? 1 : 0, opt.profit);
        trace += line;
    }
    if (sensitivity_dl) {
        const double s = econ::slr_rate_sensitivity(dealer, *sensitivity_dl);
        char line[128];
        std::snprintf(line, sizeof line, "dr_star/dfloor,%.12g\n", s);
        trace += line;
    }
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_file((std::filesystem::path(out_dir) / "curves.csv").string(), curves);
        write_file((std::filesystem::path(out_dir) / "optimum.csv").string(), trace);
        std::cout << "wrote curves.csv and optimum.csv to " << out_dir << "\n";
    } else {
        std::cout << curves << trace;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"repomech: multilateral netting engine for repo trade books"};
    app.require_subcommand(1);

    CommonOptions opt;

    auto* validate = app.add_subcommand("validate", "check book invariants");
    add_book_options(validate, opt);

    auto* net = app.add_subcommand("net", "bilateral netting of second-leg flows");
    add_book_options(net, opt);

    auto* split = app.add_subcommand("split", "build the trade flow network");
    add_book_options(split, opt);

    auto* decompose_cmd = app.add_subcommand("decompose", "peel the TFN into chains and cycles");
    add_book_options(decompose_cmd, opt);

    auto* contracts = app.add_subcommand("contracts", "replacement contracts per structure");
    add_book_options(contracts, opt);
    std::string delta_pt = "0", delta_vol = "0", vol_coeff = "0";
    contracts->add_option("--delta-pt", delta_pt, "collateral price change for margin");
    contracts->add_option("--delta-vol", delta_vol, "volatility change for margin");
    contracts->add_option("--vol-coeff", vol_coeff, "volatility coefficient for margin");

    auto* default_sim = app.add_subcommand("default-sim", "apply a nonperformance scenario");
    add_book_options(default_sim, opt);
    default_sim->add_option("--scenario", opt.scenario_path, "scenario JSON file")->required();

    auto* account = app.add_subcommand("account", "balance-sheet impact per agent per regime");
    add_book_options(account, opt);
    account->add_option("--capital", opt.capital, "SLR capital (enables the SLR columns)");
    account->add_option("--assets", opt.assets, "SLR balance-sheet assets");
    account->add_option("--exposures", opt.exposures, "SLR off-balance exposures");
    account->add_option("--slr-floor", opt.slr_floor, "SLR lower bound (e.g. 0.03 or 0.05)");
    account->add_option("--p-t", opt.p_t, "market collateral price, enables the haircut table");

    auto* compare = app.add_subcommand("compare-ccp", "central clearing comparison");
    add_book_options(compare, opt);
    compare->add_option("--fee", opt.ccp_fee, "CCP fee per unit of cleared collateral");

    auto* econ_cmd = app.add_subcommand("econ", "supply/demand curves and the dealer optimum");
    econ::DealerParams dealer;
    econ::HedgeFundParams hedge;
    hedge.alpha = 0.06;
    hedge.gamma_sigma2 = 1.0;
    hedge.k = 0.0;
    hedge.m = 1.0;
    dealer.r_int = 0.05;
    dealer.c = 1.0;
    dealer.floor = 0.05;
    dealer.demand.a = 1.0;
    dealer.demand.b = 1.0;
    dealer.demand.r0 = 0.02;
    int samples = 100;
    std::optional<double> sensitivity_dl;
    econ_cmd->add_option("--alpha", hedge.alpha, "hedge fund expected excess return");
    econ_cmd->add_option("--gamma-sigma2", hedge.gamma_sigma2, "risk aversion x variance");
    econ_cmd->add_option("--k", hedge.k, "quadratic funding cost");
    econ_cmd->add_option("--m", hedge.m, "cubic scale coefficient");
    econ_cmd->add_option("--a", dealer.demand.a, "MMF quadratic concentration cost");
    econ_cmd->add_option("--b", dealer.demand.b, "MMF cubic concentration cost");
    econ_cmd->add_option("--r0", dealer.demand.r0, "MMF outside option rate");
    econ_cmd->add_option("--r-int", dealer.r_int, "inter-dealer rate");
    econ_cmd->add_option("--c", dealer.c, "unit cost of capital");
    econ_cmd->add_option("--floor", dealer.floor, "SLR lower bound");
    econ_cmd->add_option("--d-bar", dealer.d_bar, "volume at the SLR constraint");
    econ_cmd->add_option("--samples", samples, "curve sample count");
    econ_cmd->add_option("--sensitivity-dl", sensitivity_dl,
                         "floor step for dr*/dfloor central difference");
    econ_cmd->add_option("--output-dir", opt.output_dir, "directory for CSV output");

    auto* generate = app.add_subcommand("generate", "emit a reproducible random book");
    GeneratorConfig gen;
    std::string gen_out;
    generate->add_option("--seed", gen.seed, "RNG seed")->required();
    generate->add_option("--agents", gen.n_agents, "agent count (>= 2)")->required();
    generate->add_option("--trades", gen.n_trades, "trade count")->required();
    generate->add_option("--output", gen_out, "CSV path (default stdout)");

    auto* run = app.add_subcommand("run", "full pipeline, all reports");
    add_book_options(run, opt);
    run->add_option("--scenario", opt.scenario_path, "optional scenario JSON file");
    run->add_option("--capital", opt.capital, "SLR capital (enables the SLR columns)");
    run->add_option("--assets", opt.assets, "SLR balance-sheet assets");
    run->add_option("--exposures", opt.exposures, "SLR off-balance exposures");
    run->add_option("--slr-floor", opt.slr_floor, "SLR lower bound");
    run->add_option("--fee", opt.ccp_fee, "CCP fee per unit of cleared collateral");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (generate->parsed()) {
            const std::string csv = book_to_csv(generate_book(gen));
            if (gen_out.empty())
                std::cout << csv;
            else
                write_file(gen_out, csv);
            return 0;
        }
        if (econ_cmd->parsed())
            return run_econ(resolve_output_dir(opt), dealer, hedge, hedge.alpha, samples,
                            sensitivity_dl);

        const PipelineConfig config = make_config(opt);
        if (validate->parsed()) {
            const auto book = validate_book(load_book(opt.input));
            std::cout << "ok: " << book.size() << " trades, " << book.agents().size()
                      << " agents\n";
            return 0;
        }

        const PipelineResult result = load_and_run(opt, config);
        const auto files = report_bundle(result, config);
        if (net->parsed()) {
            emit(opt, files, "netted_edges.json");
        } else if (split->parsed()) {
            emit(opt, files, "tfn.json");
        } else if (decompose_cmd->parsed()) {
            emit(opt, files, "decomposition.json");
        } else if (contracts->parsed()) {
            emit(opt, files, "contracts.txt");
            if (resolve_output_dir(opt).empty()) {
                const Money dpt = Money::parse(delta_pt);
                const Money dvol = Money::parse(delta_vol);
                const Money coeff = Money::parse(vol_coeff);
                if (!dpt.is_zero() || !dvol.is_zero()) {
                    std::vector<std::vector<std::string>> table;
                    table.push_back({"structure", "node", "margin"});
                    auto add_margins = [&](const Structure& st) {
                        for (const auto& [node, margin] :
                             margin_requirements(st, dpt, dvol, coeff))
                            table.push_back({st.id, node.label(), margin.to_string()});
                    };
                    for (const auto& c : result.decomposition.chains) add_margins(c);
                    for (const auto& c : result.decomposition.cycles) add_margins(c);
                    std::cout << "\n" << render_table(table);
                }
            }
        } else if (default_sim->parsed()) {
            emit(opt, files, "scenario_log.txt");
        } else if (account->parsed()) {
            emit(opt, files, "accounting.txt");
        } else if (compare->parsed()) {
            emit(opt, files, "ccp_comparison.txt");
        } else if (run->parsed()) {
            emit(opt, files, "");
            if (resolve_output_dir(opt).empty())
                for (const auto& [name, content] : files)
                    std::cout << "==== " << name << " ====\n" << content << "\n";
        }
        return 0;
    } catch (const repomech::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
            case Errc::bad_config:
            case Errc::io_error:
            case Errc::parse_error:
                return 2;
            default:
                return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
