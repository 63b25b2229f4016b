// abg-verify: closed-form vs oracle verification for (alpha, beta, gamma)
// Finsler metrics F = alpha * Psi(beta/alpha, gamma/alpha).
//
// Subcommands:
//   admissibility  grid sweep of the strong-convexity predicate (Pi, Gamma > 0)
//   tensors        fundamental tensor, determinant, inverse, Cartan tensor
//   spray          closed-form spray vs direct-formula spray + ell_r D^r identity
//   hamel          projective flatness: Hamel residual, Lemma-5.1 condition, P
//   douglas        Douglas tensor and B^ij consistency
//   verify-all     union of the above
//
// Exit status: 0 all checks pass, 1 any failure, 2 invalid config.

#include <iostream>

#include <CLI11.hpp>

#include "finsler/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"(alpha, beta, gamma)-metric verification harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    bool full = false;
    bool expect_flat = false, expect_not_flat = false;
    bool expect_douglas = false, expect_not_douglas = false;

    const std::vector<std::string> commands = {"admissibility", "tensors", "spray",
                                               "hamel",         "douglas", "verify-all"};
    for (const auto& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "config JSON path")->required();
        sub->add_option("--out", out_path, "write the verification report to this path");
        sub->add_flag("--full", full, "dump full tensors instead of digests");
        if (name == "hamel" || name == "verify-all") {
            sub->add_flag("--expect-flat", expect_flat, "exit 1 unless the verdict is flat");
            sub->add_flag("--expect-not-flat", expect_not_flat,
                          "exit 1 unless the verdict is not_flat");
        }
        if (name == "douglas" || name == "verify-all") {
            sub->add_flag("--expect-douglas", expect_douglas,
                          "exit 1 unless the verdict is douglas");
            sub->add_flag("--expect-not-douglas", expect_not_douglas,
                          "exit 1 unless the verdict is not_douglas");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e); // prints the message; 0 for --help
        return rc == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        finsler::cli::RunConfig cfg = finsler::cli::load_config(config_path);
        finsler::cli::RunOptions opt;
        opt.full = full;
        opt.threads = finsler::cli::thread_count_from_env();
        if (expect_flat) opt.expect_flat = true;
        if (expect_not_flat) opt.expect_flat = false;
        if (expect_douglas) opt.expect_douglas = true;
        if (expect_not_douglas) opt.expect_douglas = false;

        const auto result = finsler::cli::run(cfg, command, opt);
        if (!out_path.empty()) finsler::cli::emit_json(result.report, out_path);

        const auto& summary = result.report["summary"];
        std::cout << command << ": " << summary["checks_run"] << " checks, "
                  << summary["failures"] << " failures, max residual "
                  << summary["max_residual"].dump() << "\n";
        for (const auto& c : result.report["checks"])
            if (c["verdict"] == "fail")
                std::cout << "  FAIL " << c["name"].get<std::string>() << " residual "
                          << c["residual"].dump() << "\n";
        return result.exit_code;
    } catch (const finsler::ParseError& e) {
        std::cerr << "config parse error: " << e.what() << "\n";
        return 2;
    } catch (const finsler::InvalidConfig& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
    } catch (const finsler::UnknownFixture& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
