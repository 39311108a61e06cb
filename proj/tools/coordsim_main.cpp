#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "coordsim/errors.hpp"
#include "coordsim/io.hpp"

namespace {

struct SubcommandSpec {
    const char* kind;
    const char* help;
};

constexpr SubcommandSpec kSubcommands[] = {
    {"run", "Simulate one scenario and write per-period records"},
    {"sweep", "Run one scenario across a seed list"},
    {"predict1", "Marginal integration cost of a new provider vs ecosystem size"},
    {"predict2", "Steady-state cost per task vs ecosystem size"},
    {"instability", "Coupling share of verification cost vs ecosystem size"},
    {"sublinearity", "Total-cost growth exponent vs ecosystem size, per regime"},
    {"unbundle", "Two-sector firm-boundary (make-or-buy) experiment"},
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coordsim: coordination-cost simulator for agent ecosystems"};
    app.require_subcommand(1);

    std::string out_dir = "out";
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    std::optional<std::uint64_t> seed_override;
    app.add_option("--seed", seed_override, "Override the job's seed (or seed-derivation base)");
    bool detail = false;
    app.add_flag("--detail", detail, "Also write per-task records (run jobs)");

    constexpr std::size_t kCount = std::size(kSubcommands);
    std::string spec_args[kCount];
    CLI::App* subs[kCount];
    for (std::size_t i = 0; i < kCount; ++i) {
        subs[i] = app.add_subcommand(kSubcommands[i].kind, kSubcommands[i].help);
        subs[i]->fallthrough();
        subs[i]
            ->add_option("spec", spec_args[i],
                         i == 6 ? "Job file or 'canonical'" : "Job file or preset name")
            ->required();
    }

    CLI::App* fit = app.add_subcommand("fit", "Fit a power-law tail exponent to a sizes CSV");
    fit->fallthrough();
    std::string fit_data;
    fit->add_option("data", fit_data, "One-column headerless CSV of positive sizes")->required();
    double xmin_value = 1.0;
    CLI::Option* xmin_opt =
        fit->add_option("--xmin", xmin_value,
                        "Fixed tail cutoff (default: pick the KS-minimizing cutoff)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? coordsim::kExitSuccess : coordsim::kExitUsage;
    }

    try {
        coordsim::Job job;
        if (fit->parsed()) {
            coordsim::FitJob fj;
            fj.data_path = fit_data;
            if (xmin_opt->count() > 0)
                fj.x_min = xmin_value;
            job = coordsim::Job{"fit", std::move(fj)};
        } else {
            for (std::size_t i = 0; i < kCount; ++i)
                if (subs[i]->parsed()) {
                    job = coordsim::load_job_for_kind(spec_args[i], kSubcommands[i].kind);
                    break;
                }
        }
        const coordsim::ExecOutcome outcome =
            coordsim::execute_job(job, out_dir, detail, seed_override);
        for (const std::string& path : outcome.written)
            std::cout << "wrote " << path << "\n";
        if (!outcome.verdict_line.empty())
            std::cout << outcome.verdict_line << "\n";
        return outcome.exit_code;
    } catch (const coordsim::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return coordsim::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return coordsim::kExitError;
    }
}
