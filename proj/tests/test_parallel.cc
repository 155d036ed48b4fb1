// The serial loops are the reference; every parallel kernel must agree
// with them exactly.
#include <random>
#include <stdexcept>

#include "catch_amalgamated.hpp"
#include "oracles.h"
#include "turnkit/enrollment.h"
#include "turnkit/parallel.h"
#include "turnkit/roles.h"
#include "turnkit/synth.h"

using namespace turnkit;

TEST_CASE("MapIndex keeps index order and rethrows the first failure", "[parallel]") {
  const auto v = MapIndex<int>(100, Execution::kParallel, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == static_cast<int>(i * i));
  try {
    ForEachIndex(50, Execution::kParallel, [](std::size_t i) {
      if (i == 7 || i == 31) throw std::runtime_error(std::to_string(i));
    });
    FAIL("no error");
  } catch (const std::runtime_error &e) {
    CHECK(std::string(e.what()) == "7");
  }
}

TEST_CASE("serial and parallel pipelines agree", "[parallel]") {
  SynthConfig sc;
  sc.file_count = 10;
  sc.file_duration = Seconds(300);
  sc.score_noise_sigma = 0.25;
  sc.embedding_noise_sigma = 0.2;
  const SynthCorpus c = GenerateCorpus(sc);
  const SplitAssignment split = MakeMetaSplit(c.corpus.manifest, 5);

  RolePipelineConfig rc = RolePipelineConfig::Defaults();
  const auto rs = RunRolePipeline(c.corpus, split, rc, Execution::kSerial);
  const auto rp = RunRolePipeline(c.corpus, split, rc, Execution::kParallel);
  CHECK(rs.hypotheses == rp.hypotheses);
  CHECK(rs.Summary().global == rp.Summary().global);

  EnrollmentConfig ec;
  const auto es = RunEnrollmentPipeline(c.corpus, split, *c.embeddings, ec, Execution::kSerial);
  const auto ep = RunEnrollmentPipeline(c.corpus, split, *c.embeddings, ec, Execution::kParallel);
  CHECK(es.hypotheses == ep.hypotheses);

  const auto grid = DefaultThresholdGrid();
  CHECK(TuneRoleThresholds(c.corpus, split, Subset::kDev, grid, Execution::kSerial) ==
        TuneRoleThresholds(c.corpus, split, Subset::kDev, grid, Execution::kParallel));

  const Time tdevs[] = {Seconds(90), Seconds(150)};
  const auto ss = SweepTDev(c.corpus, split, *c.embeddings, ec, tdevs, Execution::kSerial);
  const auto sp = SweepTDev(c.corpus, split, *c.embeddings, ec, tdevs, Execution::kParallel);
  REQUIRE(ss.size() == sp.size());
  for (std::size_t i = 0; i < ss.size(); ++i) CHECK(ss[i].report == sp[i].report);
}
