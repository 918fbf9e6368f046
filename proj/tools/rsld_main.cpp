#include "rsld/engine.hpp"
#include "rsld/errors.hpp"
#include "rsld/json_io.hpp"
#include "rsld/loop_check.hpp"
#include "rsld/parser.hpp"
#include "rsld/property_lab.hpp"
#include "rsld/reduction.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitRefuted = 0;
constexpr int kExitFailed = 1;
constexpr int kExitBound = 2;
constexpr int kExitPruned = 3;
constexpr int kExitCheckFailed = 4;
constexpr int kExitUsage = 64;

int status_exit_code(rsld::DerivationStatus s) {
    switch (s) {
    case rsld::DerivationStatus::Refuted: return kExitRefuted;
    case rsld::DerivationStatus::Failed: return kExitFailed;
    case rsld::DerivationStatus::BoundExceeded: return kExitBound;
    case rsld::DerivationStatus::Pruned: return kExitPruned;
    }
    return kExitUsage;
}

[[noreturn]] void usage_error(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    std::exit(kExitUsage);
}

rsld::Program load_program(const std::string& path) {
    std::ifstream in(path);
    if (!in) usage_error("cannot open program file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return rsld::parse_program(buffer.str());
}

rsld::Rule resolve_rule(const std::string& name, rsld::Mode mode) {
    auto rule = rsld::Rule::named(name);
    if (!rule) usage_error("unknown rule '" + name + "'");
    if (rsld::is_list_mode(mode) && !rule->usable_in_list_mode()) {
        usage_error("rule '" + name + "' has no list-mode reading");
    }
    if (!rsld::is_list_mode(mode) && !rule->usable_in_priority_mode()) {
        usage_error("rule '" + name + "' is list-mode only");
    }
    return *rule;
}

rsld::PriorityGoal load_goal(const std::string& text, rsld::Mode mode) {
    if (rsld::is_list_mode(mode)) {
        return rsld::goal_from_atoms(rsld::parse_list_goal(text));
    }
    return rsld::parse_priority_goal(text);
}

void warn_on_function_symbols(const rsld::Program& p,
                              rsld::DeriveOptions::LoopCheck loop_check) {
    if (loop_check != rsld::DeriveOptions::LoopCheck::Off && !p.function_free()) {
        std::cerr << "warning: program contains function symbols; the loop check "
                     "stays sound but completeness claims do not apply\n";
    }
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("RSLD_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SLD / RSLD resolution engine with priority scheduling rules"};
    app.require_subcommand(1);

    std::string program_path, goal_text, mode_name = "prsld", rule_name = "stack";
    std::string trace_format = "text", loop_check_name = "off", dot_path;
    std::size_t max_steps = 1000, depth = 8, trials = 100;
    bool reduce_flag = false, no_advancement = false, exhaustive = false;
    bool no_occurs = false, all_rules = false, list_flag = false;
    std::uint64_t seed = default_seed();
    std::string protect_text, check_name;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--program", program_path, "program file (.lp)")->required();
        cmd->add_option("--goal", goal_text, "goal text")->required();
        cmd->add_option("--mode", mode_name, "sld | rsld | psld | prsld");
        cmd->add_option("--rule", rule_name,
                        "stack | queue | sq | center | pred-special:<p> | odd-even");
        cmd->add_flag("--no-occurs-check", no_occurs, "disable the unification occurs check");
    };

    CLI::App* run = app.add_subcommand("run", "run a single derivation");
    add_common(run);
    run->add_flag("--reduce", reduce_flag, "force reduction on (sld -> rsld semantics)");
    run->add_flag("--no-advancement", no_advancement,
                  "disable eliminating-atom advancement in priority reduction");
    run->add_option("--loop-check", loop_check_name, "evrl | evgl | off");
    run->add_option("--max-steps", max_steps, "step bound");
    run->add_option("--trace", trace_format, "text | json");

    CLI::App* tree = app.add_subcommand("tree", "build a derivation tree");
    add_common(tree);
    tree->add_option("--depth", depth, "depth bound");
    tree->add_option("--dot", dot_path, "write Graphviz to this file");
    tree->add_option("--loop-check", loop_check_name, "evrl | evgl | off");
    tree->add_flag("--all-rules", all_rules,
                   "list mode: branch over every selection (S-tree)");
    tree->add_flag("--no-advancement", no_advancement, "disable advancement");

    CLI::App* reduce = app.add_subcommand("reduce", "reduce a goal");
    reduce->add_option("--goal", goal_text, "goal text")->required();
    reduce->add_option("--protect", protect_text, "comma-separated protected variables");
    reduce->add_flag("--exhaustive", exhaustive, "minimum-length search (goals <= 12)");
    reduce->add_flag("--list", list_flag, "list mode: kept atoms never move or advance");
    reduce->add_flag("--no-advancement", no_advancement, "disable advancement");

    std::string instance_path;
    CLI::App* check = app.add_subcommand("check", "run a property-lab suite");
    check->add_option("suite", check_name,
                      "spec-independence | lowering | lifting | determinism | "
                      "duplication | embedding")
        ->required();
    check->add_option("--rule", rule_name, "rule under test");
    check->add_option("--trials", trials, "number of random trials");
    check->add_option("--seed", seed, "random seed (default: RSLD_SEED or 0)");
    check->add_option("--instance", instance_path,
                      "replay one failure from its {\"seed\", \"trial\"} JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (run->parsed()) {
            auto mode = rsld::mode_named(mode_name);
            if (!mode) usage_error("unknown mode '" + mode_name + "'");
            if (reduce_flag) {
                if (*mode == rsld::Mode::Sld) mode = rsld::Mode::Rsld;
                if (*mode == rsld::Mode::Psld) mode = rsld::Mode::Prsld;
            }
            rsld::Rule rule = resolve_rule(rule_name, *mode);
            rsld::Program program = load_program(program_path);
            rsld::PriorityGoal goal = load_goal(goal_text, *mode);

            rsld::DeriveOptions options;
            options.mode = *mode;
            options.max_steps = max_steps;
            options.advancement = !no_advancement;
            options.occurs_check = !no_occurs;
            if (loop_check_name == "evrl") {
                options.loop_check = rsld::DeriveOptions::LoopCheck::Evrl;
            } else if (loop_check_name == "evgl") {
                options.loop_check = rsld::DeriveOptions::LoopCheck::Evgl;
            } else if (loop_check_name != "off") {
                usage_error("unknown loop check '" + loop_check_name + "'");
            }
            warn_on_function_symbols(program, options.loop_check);

            rsld::DerivationRecord record = rsld::derive(program, goal, rule, options);
            if (trace_format == "json") {
                std::cout << rsld::trace_json(record, rule).dump(2) << "\n";
            } else if (trace_format == "text") {
                std::cout << rsld::render_text_trace(record);
                if (record.prune) {
                    std::cout << "witness: tau = " << rsld::to_string(record.prune->tau.substitution())
                              << "\n";
                }
            } else {
                usage_error("unknown trace format '" + trace_format + "'");
            }
            return status_exit_code(record.status);
        }

        if (tree->parsed()) {
            auto mode = rsld::mode_named(mode_name);
            if (!mode) usage_error("unknown mode '" + mode_name + "'");
            rsld::Rule rule = resolve_rule(rule_name, *mode);
            rsld::Program program = load_program(program_path);
            rsld::PriorityGoal goal = load_goal(goal_text, *mode);

            rsld::TreeOptions options;
            options.mode = *mode;
            options.depth = depth;
            options.advancement = !no_advancement;
            options.occurs_check = !no_occurs;
            options.all_rules = all_rules;
            if (loop_check_name == "evrl") {
                options.loop_check = rsld::DeriveOptions::LoopCheck::Evrl;
            } else if (loop_check_name == "evgl") {
                options.loop_check = rsld::DeriveOptions::LoopCheck::Evgl;
            }
            warn_on_function_symbols(program, options.loop_check);

            rsld::DerivationTree result = rsld::build_tree(program, goal, rule, options);
            if (!dot_path.empty()) {
                std::ofstream out(dot_path);
                out << rsld::render_dot(result);
            }
            std::cout << "nodes: " << result.node_count()
                      << "  depth: " << result.max_depth()
                      << "  complete: " << (result.fully_explored() ? "yes" : "no")
                      << "  all-leaves-failed: "
                      << (result.all_leaves_failed() ? "yes" : "no") << "\n";
            return kExitRefuted;
        }

        if (reduce->parsed()) {
            rsld::PriorityGoal goal = list_flag
                                          ? rsld::goal_from_atoms(rsld::parse_list_goal(goal_text))
                                          : rsld::parse_priority_goal(goal_text);
            rsld::VariableSet protected_vars;
            std::stringstream ss(protect_text);
            std::string var;
            while (std::getline(ss, var, ',')) {
                if (!var.empty()) protected_vars.insert(var);
            }
            rsld::ReductionOptions options;
            options.advancement = !list_flag && !no_advancement;
            options.exhaustive = exhaustive;
            auto [reduced, cert] = rsld::reduce_priority_goal(goal, protected_vars, options);
            std::cout << "N   = " << (list_flag
                                          ? rsld::to_string(std::span<const rsld::Atom>(
                                                reduced.atom_list()))
                                          : rsld::to_string(reduced))
                      << "\n";
            std::cout << "tau = " << rsld::to_string(cert.tau) << "\n";
            for (const auto& e : cert.eliminations) {
                for (const auto& b : e.eliminated) {
                    std::cout << "eliminated " << rsld::to_string(b) << " by "
                              << rsld::to_string(e.eliminator);
                    if (cert.advancement && e.new_priority != e.eliminator.priority) {
                        std::cout << " (advanced to " << rsld::to_string(e.new_priority)
                                  << ")";
                    }
                    std::cout << "\n";
                }
            }
            return kExitRefuted;
        }

        if (check->parsed()) {
            auto rule = rsld::Rule::named(rule_name);
            if (!rule) usage_error("unknown rule '" + rule_name + "'");
            std::uint64_t only_trial = 0;
            if (!instance_path.empty()) {
                std::ifstream in(instance_path);
                if (!in) usage_error("cannot open instance file '" + instance_path + "'");
                nlohmann::json instance = nlohmann::json::parse(in, nullptr, false);
                if (instance.is_discarded() || !instance.contains("seed") ||
                    !instance.contains("trial")) {
                    usage_error("instance file needs {\"seed\": N, \"trial\": M}");
                }
                seed = instance["seed"].get<std::uint64_t>();
                only_trial = instance["trial"].get<std::uint64_t>();
                trials = only_trial;
            }
            rsld::lab::CheckReport report;
            if (check_name == "spec-independence") {
                report = rsld::lab::check_spec_independence(*rule, trials, seed);
            } else if (check_name == "lowering") {
                report = rsld::lab::check_lowering_lemma(*rule, trials, seed);
            } else if (check_name == "lifting") {
                report = rsld::lab::check_lifting_lemma(*rule, trials, seed);
            } else if (check_name == "determinism") {
                report = rsld::lab::check_determinism(*rule, trials, seed);
            } else if (check_name == "duplication") {
                report = rsld::lab::check_duplication(*rule, trials, seed);
            } else if (check_name == "embedding") {
                report = rsld::lab::check_embedding(*rule, trials, seed);
            } else {
                usage_error("unknown check '" + check_name + "'");
            }
            if (only_trial > 0) {
                // keep only the replayed trial's outcome
                std::erase_if(report.failures, [&](const rsld::lab::CheckFailure& f) {
                    return f.trial != only_trial;
                });
            }
            nlohmann::json out = {{"name", report.name},
                                  {"trials", report.trials},
                                  {"vacuous", report.vacuous},
                                  {"verdict", report.verdict()},
                                  {"failures", nlohmann::json::array()}};
            for (const auto& f : report.failures) {
                out["failures"].push_back(
                    {{"seed", f.seed}, {"trial", f.trial}, {"instance", f.description}});
            }
            std::cout << out.dump(2) << "\n";
            return report.passed() ? kExitRefuted : kExitCheckFailed;
        }
    } catch (const rsld::ParseError& e) {
        usage_error(e.what());
    } catch (const rsld::EngineError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
