#include "cli_util.hpp"

#include <doctest.h>

#include <algorithm>

#include <nlohmann/json.hpp>

namespace {

const std::string kSmallSweep = R"({
  "d": [6, 9],
  "T": [60, 240],
  "trials": 4,
  "model": {"k": 1, "alpha": 0.3},
  "base_seed": 5
})";

} // namespace

TEST_CASE("model, simulate and recover are reproducible") {
    cli::ScratchDir dir("cli_pipeline");
    REQUIRE(cli::run("model --d 8 --k 2 --alpha 0.2 --seed 3 --out " + (dir / "m1.json")) == 0);
    REQUIRE(cli::run("model --d 8 --k 2 --alpha 0.2 --seed 3 --out " + (dir / "m2.json")) == 0);
    CHECK(cli::slurp(dir / "m1.json") == cli::slurp(dir / "m2.json"));

    for (const char* method : {"thinning", "cluster"}) {
        const std::string base = "simulate --model " + (dir / "m1.json") + " --T 200 --seed 11 --method " + method;
        REQUIRE(cli::run(base + " --out " + (dir / "e1.csv")) == 0);
        REQUIRE(cli::run(base + " --out " + (dir / "e2.csv")) == 0);
        CHECK(cli::slurp(dir / "e1.csv") == cli::slurp(dir / "e2.csv"));
        CHECK(cli::slurp(dir / "e1.meta.json") == cli::slurp(dir / "e2.meta.json"));
        const auto meta = nlohmann::json::parse(cli::slurp(dir / "e1.meta.json"));
        CHECK(meta.at("method") == method);
        CHECK(meta.at("d") == 8);
    }

    const std::string rec = "recover --events " + (dir / "e1.csv") + " --meta " + (dir / "e1.meta.json") +
                            " --auto --alpha 0.2 --w-minus 1 --k 2";
    REQUIRE(cli::run(rec + " --jobs 1 --out " + (dir / "n1.json")) == 0);
    REQUIRE(cli::run(rec + " --jobs 3 --out " + (dir / "n2.json")) == 0);
    CHECK(cli::slurp(dir / "n1.json") == cli::slurp(dir / "n2.json"));
    const auto net = nlohmann::json::parse(cli::slurp(dir / "n1.json"));
    CHECK(net.at("rows").size() == 8);

    REQUIRE(cli::run("recover --events " + (dir / "e1.csv") + " --h 0.05 --R 4 --m 3 --tau 0.01 --out " +
                     (dir / "n3.json")) == 0);
}

TEST_CASE("subclass model and oracle output") {
    cli::ScratchDir dir("cli_oracle");
    REQUIRE(cli::run("model --subclass --d 5 --k 2 --i-star 0 --support 2,4 --theta-minus 0.2 --out " +
                     (dir / "s.json")) == 0);
    const auto model = nlohmann::json::parse(cli::slurp(dir / "s.json"));
    CHECK(model.at("edges").size() == 2);
    REQUIRE(cli::run("oracle --model " + (dir / "s.json") + " --out " + (dir / "o.json")) == 0);
    const auto o = nlohmann::json::parse(cli::slurp(dir / "o.json"));
    CHECK(o.contains("m"));
    CHECK(o.contains("sigma"));
    CHECK(cli::run("model --subclass --d 5 --k 2 --i-star 0 --support 0,4 --theta-minus 0.2") == 2);
}

TEST_CASE("sweep outputs do not depend on the job count") {
    cli::ScratchDir dir("cli_sweep");
    cli::write(dir / "spec.json", kSmallSweep);
    REQUIRE(cli::run("sweep --spec " + (dir / "spec.json") + " --out " + (dir / "r1.csv") + " --jobs 1") == 0);
    REQUIRE(cli::run("sweep --spec " + (dir / "spec.json") + " --out " + (dir / "r2.csv") + " --jobs 4") == 0);
    CHECK(cli::slurp(dir / "r1.csv") == cli::slurp(dir / "r2.csv"));
    CHECK(cli::slurp(dir / "r1.csv").rfind("d,T,trials,successes,rate,ci_lo,ci_hi\n", 0) == 0);
}

TEST_CASE("fano subcommand writes a curve") {
    cli::ScratchDir dir("cli_fano");
    REQUIRE(cli::run("fano --d 101 --k 1 --T 0 --beta 1 --mu-bar 1 --mu-bar-star 1 --theta-minus 0.5 --curve 0:10:5 "
                     "--out " + (dir / "c.csv")) == 0);
    const auto text = cli::slurp(dir / "c.csv");
    CHECK(text.rfind("T,error_floor\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 6);
    CHECK(cli::run("fano --d 2 --k 1 --T 0 --beta 1 --mu-bar 1 --mu-bar-star 1 --theta-minus 0.5") == 2);
}

TEST_CASE("exit codes") {
    cli::ScratchDir dir("cli_exit");
    cli::write(dir / "bad.json", R"({"d": [5], "T": [100, 50]})");
    CHECK(cli::run("sweep --spec " + (dir / "bad.json") + " --out " + (dir / "r.csv")) == 2);
    cli::write(dir / "broken.json", R"({"d": [5], "estimator": {"mode": "nope"}, "T": [1]})");
    CHECK(cli::run("sweep --spec " + (dir / "broken.json") + " --out " + (dir / "r.csv")) == 2);
    CHECK(cli::run("simulate --T 10") == 2);

    REQUIRE(cli::run("model --d 4 --k 1 --seed 1 --out " + (dir / "m.json")) == 0);
    CHECK(cli::run("simulate --model " + (dir / "m.json") + " --T 1000 --seed 1 --event-cap 50 --out " +
                   (dir / "e.csv")) == 3);
    cli::write(dir / "capped.json", R"({"d": [5], "T": [100], "trials": 2, "event_cap": 10})");
    CHECK(cli::run("sweep --spec " + (dir / "capped.json") + " --out " + (dir / "r.csv")) == 3);
}
