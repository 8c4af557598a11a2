#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lumen_cli/run.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Reflector synthesis under the inverse-square law"};
    app.require_subcommand(1);
    app.fallthrough();

    lumen::cli::Invocation inv;
    std::string config, out_dir = ".";
    std::uint64_t seed = 0;
    std::size_t resolution = 0;
    double tol = 0.0, max_distance = 0.0;

    app.add_option("--config", config, "Job configuration (JSON)");
    auto* seed_opt = app.add_option("--seed", seed, "Seed for the Monte Carlo and sampling checks");
    auto* res_opt = app.add_option("--resolution", resolution, "Grid node-count hint")->check(CLI::PositiveNumber);
    auto* tol_opt = app.add_option("--tol", tol, "Relative residual tolerance")->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "Output directory for artifacts");
    app.add_flag("--quiet", inv.quiet, "Suppress the summary on stdout");

    const char* subs[][2] = {{"feasibility", "Check the energy condition"},
                             {"solve-near", "Solve a discrete near-field target"},
                             {"solve-far", "Solve a discrete far-field target"},
                             {"solve-general", "Solve a planar density by refinement"},
                             {"validate", "Solve, then run the configured validation checks"},
                             {"export-mesh", "Solve and write the reflector as an OBJ mesh"},
                             {"optimal-delta", "Print the delta maximizing the feasibility constant"}};
    CLI::Option* m_opt = nullptr;
    for (const auto& s : subs) {
        auto* sub = app.add_subcommand(s[0], s[1]);
        if (std::string(s[0]) == "optimal-delta")
            m_opt = sub->add_option("--M", max_distance, "Max distance M from the source to the target")
                        ->check(CLI::PositiveNumber)
                        ->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: code=config-error message=\"" << e.what() << "\"\n";
        return 1;
    }

    inv.subcommand = app.get_subcommands().front()->get_name();
    inv.config = config;
    inv.out_dir = out_dir;
    if (*seed_opt)
        inv.seed = seed;
    if (*res_opt)
        inv.resolution = resolution;
    if (*tol_opt)
        inv.tol = tol;
    if (m_opt && *m_opt)
        inv.max_distance = max_distance;
    return lumen::cli::run(inv, std::cout, std::cerr);
}
