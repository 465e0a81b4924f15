#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shtor/congruence.hpp"
#include "shtor/galois.hpp"
#include "shtor/hecke.hpp"

// End-to-end orchestration: per-level torsion reports, Hecke eigenvalue
// packages on the odd torsion subspaces, representation matching, torsion
// predictions, disk caching and table emission.

namespace shtor::pipeline {

struct JobConfig {
  int m = 4;
  std::vector<long> levels;
  int degree = 0;  // 0: default_degree(m)
  std::vector<long> hecke_primes = {2, 3, 5, 7};
  // additional odd primes p: report Hecke packages on H tensor F_p (the
  // torsion subspaces of the report are always processed)
  std::vector<long> mod_primes;
  long reduction_budget = 10000;
  std::string cache_dir;       // empty: caching disabled
  std::string format = "txt";  // txt | csv | json
  bool parallel = true;
};

// homology node of most interest per rank: m=2 -> 1, m=3 -> 2, m=4 -> 5
int default_degree(int m);

// ---- disk cache ----

// Content-addressed text blobs under a directory; writes go to a temporary
// file first and are renamed into place, so concurrent jobs never observe a
// partial entry.  An empty directory string disables the cache.
class Cache {
 public:
  explicit Cache(std::string dir);
  bool enabled() const { return !dir_.empty(); }
  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& value) const;

 private:
  std::string dir_;
};

// version prefix baked into every cache key; bump when formats change
extern const char* kCacheVersion;

// ---- per-level computation ----

struct HeckeBlock {
  long p = 0;
  std::string subspace;  // "torsion" (p-torsion) or "modp" (H tensor F_p)
  long dimension = 0;
  std::vector<std::pair<std::pair<long, int>, linalg::FpMatrix>> matrices;  // (ell,k)
  std::vector<galois::EigenPackage> packages;  // simultaneous eigenpackages
  std::vector<long> multiplicities;            // aligned with packages
  bool eigenvalues_outside_bound = false;
};

struct LevelResult {
  long N = 0;
  bool ok = false;
  congruence::TorsionReport report;
  std::vector<HeckeBlock> blocks;
  std::vector<std::string> diagnostics;  // warnings and per-level errors
};

// torsion report + Hecke packages for one level; never throws for per-level
// computational failures (they land in diagnostics with ok = false)
LevelResult run_level(const JobConfig& cfg, long N);

// all configured levels; failures are isolated per level
std::vector<LevelResult> run_compute(const JobConfig& cfg);

// ---- predictions (rank 4, degree 5) ----

struct Prediction {
  long N = 0;
  std::vector<long> primes;  // group-torsion primes {2, 3} and possibly 5
};

std::vector<Prediction> run_predict(long lo, long hi);

// ---- matching ----

nlohmann::json run_match(const galois::EigenPackage& pkg, const galois::MatchOptions& options,
                         const std::string& class_id);

// ---- emission ----

// torsion table rows (level, degree, free rank, odd torsion primes/dims)
std::string torsion_table_txt(const std::vector<LevelResult>& results);
std::string torsion_table_csv(const std::vector<LevelResult>& results);
// Hecke polynomial rows: one line per (package, ell), the degree-m polynomial
// with coefficients (-1)^k ell^{k(k-1)/2} a(ell,k); each row is rebuilt from
// the package entries at print time
std::string hecke_table_txt(const std::vector<LevelResult>& results);
std::string hecke_table_csv(const std::vector<LevelResult>& results);
nlohmann::json results_json(const std::vector<LevelResult>& results);
std::string prediction_txt(const std::vector<Prediction>& preds);
std::string prediction_csv(const std::vector<Prediction>& preds);
nlohmann::json prediction_json(const std::vector<Prediction>& preds);

// dispatch on cfg.format ("txt", "csv", "json")
std::string emit(const JobConfig& cfg, const std::vector<LevelResult>& results);
std::string emit_predictions(const std::string& format, const std::vector<Prediction>& preds);

}  // namespace shtor::pipeline
