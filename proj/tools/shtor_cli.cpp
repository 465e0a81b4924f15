#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "shtor/pipeline.hpp"

using namespace shtor;

namespace {

void add_common(CLI::App* cmd, pipeline::JobConfig& cfg) {
  cmd->add_option("--rank,-m", cfg.m, "matrix rank m (2, 3 or 4)")->check(CLI::Range(2, 4));
  cmd->add_option("--level,-N", cfg.levels, "level N (repeatable)")->required();
  cmd->add_option("--degree", cfg.degree, "cohomological degree (0: default for the rank)");
  cmd->add_option("--ell,-l", cfg.hecke_primes, "Hecke primes (repeatable)");
  cmd->add_option("--modp", cfg.mod_primes,
                  "also report packages on H tensor F_p for these odd primes (repeatable)");
  cmd->add_option("--budget", cfg.reduction_budget, "reduction cone-step budget");
  cmd->add_option("--cache-dir", cfg.cache_dir, "directory for cached cell tables and matrices");
  cmd->add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"txt", "csv", "json"}));
  cmd->add_flag("!--serial", cfg.parallel, "disable OpenMP parallelism");
}

int emit_and_status(const pipeline::JobConfig& cfg,
                    const std::vector<pipeline::LevelResult>& results) {
  std::cout << pipeline::emit(cfg, results);
  for (const auto& r : results)
    for (const auto& d : r.diagnostics) std::cerr << "note: " << d << "\n";
  for (const auto& r : results)
    if (!r.ok) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"torsion in the homology of congruence subgroups of SL(m,Z), with "
               "Hecke eigenvalue packages and Galois representation matching"};
  app.require_subcommand(1);

  // predict
  long pred_from = 11, pred_to = 31;
  std::string pred_format = "txt";
  CLI::App* predict = app.add_subcommand("predict", "group-torsion primes per level (rank 4)");
  predict->add_option("--from", pred_from, "first level");
  predict->add_option("--to", pred_to, "last level");
  predict->add_option("--format", pred_format, "output format")
      ->check(CLI::IsMember({"txt", "csv", "json"}));

  // compute
  pipeline::JobConfig ccfg;
  ccfg.format = "json";
  CLI::App* compute = app.add_subcommand(
      "compute", "torsion report and Hecke eigenvalue packages for the given levels");
  add_common(compute, ccfg);

  // hecke
  pipeline::JobConfig hcfg;
  long hecke_p = 0;
  CLI::App* heckec = app.add_subcommand("hecke", "Hecke matrices on the p-torsion subspace");
  add_common(heckec, hcfg);
  heckec->add_option("--p,-p", hecke_p, "odd torsion prime")->required();

  // match
  std::string pkg_file, class_id = "1";
  galois::MatchOptions mopts;
  long conductor_bound = 0;
  CLI::App* match = app.add_subcommand("match", "match an eigenvalue package file against "
                                                "character-sum representations");
  match->add_option("--package", pkg_file, "eigenpackage JSON file")->required();
  match->add_option("--class-id", class_id, "identifier echoed in the report");
  match->add_option("--max-power", mopts.max_power, "largest cyclotomic power");
  match->add_option("--extension", mopts.extension_degree, "value field extension bound");
  match->add_option("--conductor-bound", conductor_bound, "character conductor bound (0: N*p)");

  // tables
  pipeline::JobConfig tcfg;
  CLI::App* tables = app.add_subcommand(
      "tables", "plain tables of torsion ranks and Hecke polynomial rows");
  add_common(tables, tcfg);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*predict) {
      std::cout << pipeline::emit_predictions(pred_format, pipeline::run_predict(pred_from, pred_to));
      return 0;
    }
    if (*compute) return emit_and_status(ccfg, pipeline::run_compute(ccfg));
    if (*heckec) {
      hcfg.mod_primes.push_back(hecke_p);
      std::vector<pipeline::LevelResult> results = pipeline::run_compute(hcfg);
      nlohmann::json out = nlohmann::json::array();
      for (const auto& r : results)
        for (const auto& b : r.blocks) {
          if (b.p != hecke_p) continue;
          nlohmann::json mats = nlohmann::json::array();
          for (const auto& [lk, mat] : b.matrices) {
            nlohmann::json rows = nlohmann::json::array();
            for (int i = 0; i < mat.rows(); ++i) {
              nlohmann::json row = nlohmann::json::array();
              for (int j = 0; j < mat.cols(); ++j) row.push_back(mat.at(i, j));
              rows.push_back(std::move(row));
            }
            mats.push_back({{"ell", lk.first}, {"k", lk.second}, {"matrix", std::move(rows)}});
          }
          out.push_back({{"level", r.N},
                         {"p", b.p},
                         {"dimension", b.dimension},
                         {"matrices", std::move(mats)}});
        }
      std::cout << out.dump(2) << "\n";
      for (const auto& r : results)
        if (!r.ok) return 1;
      return 0;
    }
    if (*match) {
      std::ifstream in(pkg_file);
      if (!in) {
        std::cerr << "error: cannot open " << pkg_file << "\n";
        return 1;
      }
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "error: " << pkg_file << ": " << e.what() << "\n";
        return 1;
      }
      galois::EigenPackage pkg = galois::package_from_json(j);
      mopts.conductor_bound = conductor_bound;
      std::cout << pipeline::run_match(pkg, mopts, class_id).dump(2) << "\n";
      return 0;
    }
    if (*tables) {
      if (tcfg.format == "json") tcfg.format = "txt";
      return emit_and_status(tcfg, pipeline::run_compute(tcfg));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
