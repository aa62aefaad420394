// strata: batch runner, plan validation, report generation and key-node
// ingestion for the hierarchical web-agent pipeline.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "strata/pddl/consistency.hpp"
#include "strata/pddl/parser.hpp"
#include "strata/run/batch.hpp"
#include "strata/run/config.hpp"
#include "strata/run/evaluate.hpp"
#include "strata/run/keynodes.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;  // invalid plan, empty run dir, ...
constexpr int kUsageError = 2;     // unparseable inputs, bad config

int cmd_validate_plan(const std::string& domain_path, const std::string& plan_path) {
  using namespace strata;
  try {
    pddl::DomainFile domain = pddl::parse_domain(run::read_text_file(domain_path));
    std::vector<pddl::GroundAction> plan = pddl::parse_plan(run::read_text_file(plan_path));
    pddl::ConsistencyReport report = pddl::check_consistency(domain, plan);
    std::cout << pddl::to_json(report).dump(2) << "\n";
    return report.valid ? kOk : kDomainFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
}

int cmd_run(const std::string& config_path, const std::string& output_override) {
  using namespace strata;
  try {
    run::RunConfig config = run::load_run_config(config_path);
    if (!output_override.empty()) {
      config.output_dir = std::filesystem::absolute(output_override).lexically_normal().string();
    }
    run::BatchResult result = run::run_batch(config);
    std::cout << "run directory: " << result.run_dir.string() << "\n"
              << "executed: " << result.executed << ", skipped: " << result.skipped
              << ", with recorded errors: " << result.failed << "\n";
    return kOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
}

int cmd_evaluate(const std::string& run_dir) {
  using namespace strata;
  try {
    run::EvaluateResult result = run::evaluate_run_dir(run_dir);
    std::cout << "report: " << result.report_path.string() << "\n";
    for (const auto& note : result.report.excluded) {
      std::cerr << "excluded: " << note << "\n";
    }
    return kOk;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EmptyInput) {
      std::cerr << "error: no trajectories\n";
      return kDomainFailure;
    }
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
}

int cmd_convert_keynodes(const std::string& annotations_path, const std::string& config_path,
                         const std::string& out_path) {
  using namespace strata;
  try {
    run::RunConfig config = run::load_run_config(config_path);
    run::BackendSet backends(config);
    // drafting goes through the planner role, review flags through the judge
    run::BackendSet::TaskBackends bound = backends.for_task("__keynodes__");
    Json annotations = parse_json(run::read_text_file(annotations_path), annotations_path);
    Json result = run::convert_keynodes(annotations, *bound.roles.planner,
                                        *bound.roles.judge, config.budgets.retry_r);
    run::write_text_file(out_path, result.dump(2) + "\n");
    std::cout << "drafts: " << out_path << " (" << result["drafts"].size() << " converted, "
              << result["skipped"].size() << " skipped)\n";
    for (const Json& skip : result["skipped"]) {
      std::cerr << "skipped " << skip["task_id"].get<std::string>() << ": "
                << skip["error"].get<std::string>() << "\n";
    }
    return kOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical web-agent pipeline and process-based evaluation harness"};
  app.require_subcommand(1);

  std::string domain_path, plan_path;
  CLI::App* validate =
      app.add_subcommand("validate-plan", "check a ground plan against a PDDL domain file");
  validate->add_option("domain", domain_path, "domain file path")->required();
  validate->add_option("plan", plan_path, "plan file path")->required();

  std::string config_path, output_override;
  CLI::App* run_cmd = app.add_subcommand("run", "execute a task batch");
  run_cmd->add_option("--config", config_path, "run config JSON")->required();
  run_cmd->add_option("--output", output_override, "override the configured output directory");

  std::string run_dir;
  CLI::App* eval_cmd =
      app.add_subcommand("evaluate", "compute the metrics report for a run directory");
  eval_cmd->add_option("run_dir", run_dir, "run directory produced by 'run'")->required();

  std::string annotations_path, kn_config_path, kn_out = "keynode_drafts.json";
  CLI::App* keynodes = app.add_subcommand(
      "convert-keynodes", "draft human plans from key-node annotations (review required)");
  keynodes->add_option("annotations", annotations_path, "key-node annotations JSON")->required();
  keynodes->add_option("--config", kn_config_path, "run config providing the backends")
      ->required();
  keynodes->add_option("--out", kn_out, "output path for the drafts document");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  if (validate->parsed()) return cmd_validate_plan(domain_path, plan_path);
  if (run_cmd->parsed()) return cmd_run(config_path, output_override);
  if (eval_cmd->parsed()) return cmd_evaluate(run_dir);
  if (keynodes->parsed()) return cmd_convert_keynodes(annotations_path, kn_config_path, kn_out);
  return kUsageError;
}
