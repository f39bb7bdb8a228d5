#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "qkd/presets.hpp"
#include "qkd/profile.hpp"

namespace {

constexpr const char* kUsage = R"(usage: qkdsim <preset|custom> [options]

presets: fig3 | fig6 | fig8 | table3 | mc-validate
custom:  sweep defined by the profile's sweep_axis/sweep_start/stop/step

options:
  --profile FILE   load a key=value profile (else $QKDSIM_DEFAULT_PROFILE,
                   else built-in defaults)
  --set key=value  override one profile key (repeatable; wins over the file)
  --out DIR        output directory (default: out)
  --seed N         Monte Carlo seed (equivalent to --set seed=N)
  --jobs K         worker threads for sweeps and simulation (default: all)

exit codes: 0 ok, 2 validation ledger failed, 64 usage error
)";

int usage_error(const std::string& message) {
    std::cerr << "qkdsim: " << message << "\n" << kUsage;
    return qkd::kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) return usage_error("missing command");
    const std::string command = args[0];
    if (command == "-h" || command == "--help" || command == "help") {
        std::cout << kUsage;
        return qkd::kExitOk;
    }
    if (command != "custom" && !qkd::is_preset_name(command))
        return usage_error("unknown command '" + command + "'");

    std::string profile_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    int jobs = 0;

    for (size_t i = 1; i < args.size(); ++i) {
        const std::string& arg = args[i];
        const auto next = [&]() -> const std::string* {
            return i + 1 < args.size() ? &args[++i] : nullptr;
        };
        if (arg == "--profile") {
            const std::string* v = next();
            if (!v) return usage_error("--profile needs a file");
            profile_path = *v;
        } else if (arg == "--set") {
            const std::string* v = next();
            if (!v) return usage_error("--set needs key=value");
            overrides.push_back(*v);
        } else if (arg == "--out") {
            const std::string* v = next();
            if (!v) return usage_error("--out needs a directory");
            out_dir = *v;
        } else if (arg == "--seed") {
            const std::string* v = next();
            if (!v) return usage_error("--seed needs a value");
            overrides.push_back("seed=" + *v);
        } else if (arg == "--jobs") {
            const std::string* v = next();
            if (!v) return usage_error("--jobs needs a value");
            try {
                jobs = std::stoi(*v);
            } catch (...) {
                return usage_error("--jobs needs an integer");
            }
        } else {
            return usage_error("unknown option '" + arg + "'");
        }
    }

    if (profile_path.empty()) {
        if (const char* env = std::getenv("QKDSIM_DEFAULT_PROFILE")) profile_path = env;
    }

    qkd::RunProfile profile;
    try {
        if (!profile_path.empty()) profile = qkd::load_profile_file(profile_path);
        qkd::apply_overrides(profile, overrides);
        profile.validate();
    } catch (const std::exception& e) {
        return usage_error(e.what());
    }

    try {
        const qkd::PresetOutcome outcome =
            command == "custom" ? qkd::run_custom(profile, out_dir, jobs, std::cout)
                                : qkd::run_preset(command, profile, out_dir, jobs, std::cout);
        return outcome.exit_code;
    } catch (const std::invalid_argument& e) {
        return usage_error(e.what());
    } catch (const std::exception& e) {
        std::cerr << "qkdsim: " << e.what() << "\n";
        return 1;
    }
}
