#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "mta/dataset.hpp"
#include "mta/experiment.hpp"
#include "mta/io.hpp"

using namespace mta;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mta_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(MTA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("generate writes the requested rows") {
  const fs::path d = scratch("generate");
  REQUIRE(run("generate --classes 3 --per-class 3000 --seed 4 --out " + q(d / "a.csv")) == 0);
  const LabeledDataset ds = read_dataset_csv(d / "a.csv");
  CHECK(ds.size() == 9000);
  CHECK(ds.count(Split::kTrain) == 9000);
  CHECK(fs::exists(d / "a.meta.json"));
  REQUIRE(run("generate --classes 3 --per-class 3000 --seed 4 --out " + q(d / "b.csv")) == 0);
  CHECK(read_text_file(d / "a.csv") == read_text_file(d / "b.csv"));
  CHECK(run("generate --classes 3 --per-class 0 --out " + q(d / "c.csv")) == 1);
  CHECK(run("generate --classes 3 --per-class 10 --out " + q(d / "c.csv") + " --bogus") == 1);
}

TEST_CASE("corrupt only touches the train split") {
  const fs::path d = scratch("corrupt");
  REQUIRE(run("generate --per-class 200 --n-train 300 --n-meta 30 --n-test 90 --seed 1 --out " +
              q(d / "data.csv")) == 0);
  REQUIRE(run("corrupt --data " + q(d / "data.csv") + " --kind symmetric --rate 0 --seed 2 --out " +
              q(d / "clean.csv")) == 0);
  const LabeledDataset clean = read_dataset_csv(d / "clean.csv");
  CHECK(clean.noisy_labels == clean.clean_labels);

  REQUIRE(run("corrupt --data " + q(d / "data.csv") +
              " --kind pairs --rate 1 --pairs 0:1 --seed 2 --out " + q(d / "pairs.csv")) == 0);
  const LabeledDataset flipped = read_dataset_csv(d / "pairs.csv");
  for (std::size_t i = 0; i < flipped.size(); ++i) {
    const int y = flipped.clean_labels[i];
    const int noisy = (*flipped.noisy_labels)[i];
    if (flipped.split[i] == Split::kTrain && y == 0) {
      CHECK(noisy == 1);
    } else {
      CHECK(noisy == y);
    }
  }
  const auto report = nlohmann::json::parse(read_text_file(d / "pairs.noise.json"));
  CHECK(report["kind"] == "pairs");
  CHECK(report["transition"][0][1] == 1.0);

  CHECK(run("corrupt --data " + q(d / "missing.csv") + " --rate 0.2 --out " + q(d / "x.csv")) == 3);
  CHECK(run("corrupt --data " + q(d / "data.csv") + " --rate 1.5 --out " + q(d / "x.csv")) != 0);
}

TEST_CASE("train records a results row") {
  const fs::path d = scratch("train");
  REQUIRE(run("generate --per-class 120 --n-train 240 --n-meta 30 --n-test 90 --seed 3 --out " +
              q(d / "data.csv")) == 0);
  REQUIRE(run("corrupt --data " + q(d / "data.csv") + " --kind symmetric --rate 0.4 --seed 2 --out " +
              q(d / "noisy.csv")) == 0);
  const std::string common = " --data " + q(d / "noisy.csv") +
                             " --iterations 20 --ce-epochs 2 --hidden 8 --results " +
                             q(d / "results.csv");
  REQUIRE(run("train --method ce --out-dir " + q(d / "ce") + common) == 0);
  REQUIRE(run("train --method meta --out-dir " + q(d / "meta") + common) == 0);
  const auto rows = read_results_csv(d / "results.csv");
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].estimation_error.has_value());
  CHECK(rows[1].estimation_error.has_value());
  CHECK(rows[1].rate == 0.4);
  CHECK(fs::exists(d / "meta" / "model.txt"));
  CHECK(fs::exists(d / "meta" / "transition.csv"));
  CHECK(fs::exists(d / "meta" / "trace.csv"));

  const std::string ev = "eval --model " + q(d / "meta" / "model.txt") + " --data " +
                         q(d / "noisy.csv") + " --transition " + q(d / "meta" / "transition.csv") +
                         " --out " + q(d / "eval.json");
  REQUIRE(run(ev) == 0);
  const auto metrics = nlohmann::json::parse(read_text_file(d / "eval.json"));
  CHECK(metrics["accuracy"].get<double>() == doctest::Approx(rows[1].test_accuracy));
  CHECK(metrics["estimation_error"].get<double>() ==
        doctest::Approx(*rows[1].estimation_error));

  CHECK(run("train --method mwnet --out-dir " + q(d / "x") + common) == 1);
  CHECK(run("train --method meta --alpha -1 --out-dir " + q(d / "x") + common) == 1);
  CHECK(run("eval --model " + q(d / "nope.txt") + " --data " + q(d / "noisy.csv")) == 3);
}

TEST_CASE("sweep is resumable and reports failures") {
  const fs::path d = scratch("sweep");
  const std::string grid =
      "sweep --methods ce,smodel --rates 0.2,0.4 --seeds 1,2 --n-train 150 --n-meta 15 "
      "--n-test 60 --iterations 10 --ce-epochs 1 --hidden 4 --jobs 2 --results " +
      q(d / "sweep.csv");
  REQUIRE(run(grid) == 0);
  CHECK(read_results_csv(d / "sweep.csv").size() == 8);
  REQUIRE(run(grid) == 0);
  CHECK(read_results_csv(d / "sweep.csv").size() == 8);

  const std::string partial =
      "sweep --methods forward,glc --rates 0.2 --seeds 1 --n-train 150 --n-meta 0 "
      "--n-test 60 --iterations 10 --ce-epochs 1 --hidden 4 --results " +
      q(d / "partial.csv");
  CHECK(run(partial) != 0);
  const auto rows = read_results_csv(d / "partial.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].method == Method::kForward);
  CHECK(rows[0].status == "ok");
  CHECK(rows[1].method == Method::kGlc);
  CHECK(rows[1].status == "failed");
}
