// Serial reference loops vs OpenMP loops on the batch kernels. Each row
// checks that both paths produce identical results before timing them.
//
//   bench_kernels [files] [repeats]
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "turnkit/enrollment.h"
#include "turnkit/metrics.h"
#include "turnkit/parallel.h"
#include "turnkit/roles.h"
#include "turnkit/synth.h"

using namespace turnkit;

namespace {

double BestOf(int repeats, const std::function<void()> &fn) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

template <class Run>
void Row(const char *name, int repeats, Run run) {
  const bool same = run(Execution::kSerial) == run(Execution::kParallel);
  const double serial = BestOf(repeats, [&] { run(Execution::kSerial); });
  const double parallel = BestOf(repeats, [&] { run(Execution::kParallel); });
  std::printf("%-22s %10.4f %10.4f %8.2fx  %s\n", name, serial, parallel, serial / parallel,
              same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char **argv) {
  const std::size_t files = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 24;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;

  SynthConfig sc;
  sc.file_count = files;
  sc.file_duration = Seconds(600);
  sc.score_noise_sigma = 0.25;
  sc.embedding_noise_sigma = 0.1;
  const SynthCorpus c = GenerateCorpus(sc);
  const SplitAssignment split = MakeMetaSplit(c.corpus.manifest, 1);

  // Decoded role hypotheses, scored again and again by the batch IER row.
  RolePipelineConfig rc = RolePipelineConfig::Defaults();
  rc.evaluate_on = Subset::kTrain;
  const auto hyps = RunRolePipeline(c.corpus, split, rc).hypotheses;
  std::vector<std::pair<Annotation, Annotation>> pairs;
  for (const auto &iv : c.corpus.manifest.interviews()) {
    auto it = hyps.find(iv.file_id);
    if (it != hyps.end()) pairs.emplace_back(iv.ToRoles(c.corpus.references.at(iv.file_id)), it->second);
  }

  std::printf("threads=%d files=%zu repeats=%d\n", ThreadCount(), files, repeats);
  std::printf("%-22s %10s %10s %9s\n", "kernel", "serial_s", "parallel_s", "speedup");

  Row("batch IER", repeats, [&](Execution exec) {
    return MapIndex<IerReport>(pairs.size(), exec, [&](std::size_t i) {
      return IdentificationErrorRate(pairs[i].first, pairs[i].second,
                                     Segment(Time(), pairs[i].first.EndTime() + Seconds(1)));
    });
  });
  Row("role pipeline", repeats, [&](Execution exec) {
    return RunRolePipeline(c.corpus, split, rc, exec).hypotheses;
  });
  const auto grid = DefaultThresholdGrid();
  Row("threshold tuning", repeats, [&](Execution exec) {
    return TuneRoleThresholds(c.corpus, split, Subset::kTrain, grid, exec);
  });
  EnrollmentConfig ec;
  ec.evaluate_on = Subset::kTrain;
  Row("enrollment pipeline", repeats, [&](Execution exec) {
    return RunEnrollmentPipeline(c.corpus, split, *c.embeddings, ec, exec).hypotheses;
  });
  const std::vector<Time> tdevs = ParseTimeGrid("90:180:10");
  Row("tDev sweep", repeats, [&](Execution exec) {
    std::vector<IerReport> out;
    for (const auto &r : SweepTDev(c.corpus, split, *c.embeddings, ec, tdevs, exec)) out.push_back(r.report);
    return out;
  });
  return 0;
}
