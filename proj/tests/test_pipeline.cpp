#include <doctest.h>

#include <filesystem>

#include "shtor/pipeline.hpp"

using namespace shtor;
using namespace shtor::pipeline;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("shtor-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(reinterpret_cast<uintptr_t>(this)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("default homology node per rank") {
  CHECK(default_degree(2) == 1);
  CHECK(default_degree(3) == 2);
  CHECK(default_degree(4) == 5);
  CHECK_THROWS_AS(default_degree(5), std::invalid_argument);
}

TEST_CASE("predictions over a level range") {
  auto preds = run_predict(1, 60);
  REQUIRE(preds.size() == 60);
  CHECK(preds[0].primes == std::vector<long>{2, 3, 5});    // N = 1
  CHECK(preds[10].primes == std::vector<long>{2, 3, 5});   // N = 11
  CHECK(preds[30].primes == std::vector<long>{2, 3, 5});   // N = 31
  CHECK(preds[49].primes == std::vector<long>{2, 3});      // N = 50
  CHECK(preds[21].primes == std::vector<long>{2, 3});      // N = 22
  std::string txt = emit_predictions("txt", preds);
  CHECK(txt.find("31  2 3 5") != std::string::npos);
  std::string csv = emit_predictions("csv", preds);
  CHECK(csv.rfind("level,primes", 0) == 0);
  auto j = nlohmann::json::parse(emit_predictions("json", preds));
  REQUIRE(j.size() == 60);
  CHECK(j[10]["level"] == 11);
  CHECK(j[10]["primes"] == std::vector<long>({2, 3, 5}));
}

TEST_CASE("cache semantics") {
  TempDir tmp;
  Cache cache(tmp.path.string());
  CHECK(cache.enabled());
  CHECK_FALSE(cache.get("absent.txt").has_value());
  cache.put("blob.txt", "payload");
  REQUIRE(cache.get("blob.txt").has_value());
  CHECK(*cache.get("blob.txt") == "payload");
  cache.put("blob.txt", "rewritten");
  CHECK(*cache.get("blob.txt") == "rewritten");
  Cache off("");
  CHECK_FALSE(off.enabled());
  off.put("k", "v");  // no-op
  CHECK_FALSE(off.get("k").has_value());
}

TEST_CASE("rank-2 level 11 end to end") {
  JobConfig cfg;
  cfg.m = 2;
  cfg.levels = {11};
  cfg.mod_primes = {97};
  auto results = run_compute(cfg);
  REQUIRE(results.size() == 1);
  const LevelResult& r = results[0];
  CHECK(r.ok);
  CHECK(r.report.free_rank == 3);
  REQUIRE(r.blocks.size() == 1);
  const HeckeBlock& b = r.blocks[0];
  CHECK(b.p == 97);
  CHECK(b.subspace == "modp");
  CHECK(b.dimension == 3);
  CHECK(b.matrices.size() == 8);  // ell in {2,3,5,7}, k in {1,2}
  CHECK_FALSE(b.eigenvalues_outside_bound);
  REQUIRE(b.packages.size() == 2);
  long total = 0;
  for (long m : b.multiplicities) total += m;
  CHECK(total == 3);

  // one package carries the eigenvalue ell + 1, the other the cusp values
  std::string txt = hecke_table_txt(results);
  CHECK(txt.find("1 - 3*X + 2*X^2") != std::string::npos);  // a(2,1) = 3
  CHECK(txt.find("1 + 2*X + 2*X^2") != std::string::npos);  // a(2,1) = -2
  std::string csv = hecke_table_csv(results);
  CHECK(csv.rfind("level,p,class,ell,u_type,polynomial", 0) == 0);

  std::string table = torsion_table_txt(results);
  CHECK(table.find("11  1  3") != std::string::npos);
  auto j = results_json(results);
  REQUIRE(j.size() == 1);
  CHECK(j[0]["level"] == 11);
  CHECK(j[0]["ok"] == true);
  CHECK(j[0]["free_rank"] == 3);
  CHECK(j[0]["hecke"][0]["dimension"] == 3);

  // every emission format dispatches
  for (const char* fmt : {"txt", "csv", "json"}) {
    cfg.format = fmt;
    CHECK_FALSE(emit(cfg, results).empty());
  }
}

TEST_CASE("warm cache reruns are byte-identical") {
  TempDir tmp;
  JobConfig cfg;
  cfg.m = 2;
  cfg.levels = {11};
  cfg.mod_primes = {97};
  cfg.cache_dir = tmp.path.string();
  cfg.format = "json";
  std::string cold = emit(cfg, run_compute(cfg));
  // matrices are now served from disk
  bool has_matrix_entry = false;
  for (auto& e : std::filesystem::directory_iterator(tmp.path))
    if (e.path().filename().string().find("hecke") != std::string::npos)
      has_matrix_entry = true;
  CHECK(has_matrix_entry);
  std::string warm = emit(cfg, run_compute(cfg));
  CHECK(cold == warm);
}

TEST_CASE("per-level failures are isolated") {
  JobConfig cfg;
  cfg.m = 2;
  cfg.levels = {11};
  cfg.mod_primes = {97};
  cfg.reduction_budget = 0;  // forces an exhausted reduction
  auto results = run_compute(cfg);
  REQUIRE(results.size() == 1);
  CHECK_FALSE(results[0].ok);
  CHECK_FALSE(results[0].diagnostics.empty());
}

TEST_CASE("match report plumbing") {
  auto F = std::make_shared<const gf::Field>(5);
  galois::EigenPackage pkg;
  pkg.m = 4;
  pkg.N = 11;
  pkg.p = 5;
  pkg.field = F;
  for (long ell : {2L, 3L, 7L})
    for (int k = 1; k <= 4; ++k)
      pkg.entries[{ell, k}] = k == 4 ? F->one() : F->zero();
  auto report = run_match(pkg, {}, "11a");
  CHECK(report["level"] == 11);
  CHECK(report["class_id"] == "11a");
  CHECK(!report["matched"].empty());
}
