// Minimal end-to-end walkthrough: build one trajectory by hand, score it
// under two families and two schedules, and print the per-step breakdown.

#include <cstdio>

#include "tps/engine.hpp"
#include "tps/score_family.hpp"
#include "tps/weights.hpp"

int main() {
    // A six-step episode that ends in success; confidence rises late.
    const std::vector<double> stream = {0.35, 0.40, 0.45, 0.60, 0.80, 0.93};
    const int outcome = 1;

    for (const auto fam_name : {"log", "brier"}) {
        const auto fam = fam_name == std::string("log") ? tps::ScoreFamily::log_score()
                                                        : tps::ScoreFamily::brier();
        for (const auto kind : {tps::WeightSchedule::Kind::linear_front,
                                tps::WeightSchedule::Kind::uniform}) {
            const auto w = tps::weights({kind}, stream.size());
            const auto res = tps::tps_complete(stream, outcome, w, fam, "demo-1");
            std::printf("%-6s %-17s total %+.6f\n", fam_name, tps::schedule_name(kind),
                        res.total);
            for (const auto& step : res.per_step)
                std::printf("   step %zu  w=%.4f  contribution %+.6f\n", step.step, step.weight,
                            step.score);
        }
    }
    return 0;
}
