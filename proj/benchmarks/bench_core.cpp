/*
   Copyright 2026 The otasync Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <benchmark/benchmark.h>

#include "otasync/channel.hpp"
#include "otasync/monte_carlo.hpp"
#include "otasync/nr_signal.hpp"
#include "otasync/ptp.hpp"
#include "otasync/sync_estimator.hpp"

using namespace otasync;

namespace {

int scs_of(const benchmark::State& state) { return static_cast<int>(state.range(0)); }

void BM_Modulate(benchmark::State& state) {
    const auto num = Numerology::from_scs(scs_of(state));
    const auto pss = generate_pss(0);
    for (auto _ : state) benchmark::DoNotOptimize(modulate(pss, num));
}
BENCHMARK(BM_Modulate)->Arg(15)->Arg(60);

void BM_ChannelApply(benchmark::State& state) {
    const auto num = Numerology::from_scs(scs_of(state));
    const auto tx = modulate(generate_pss(0), num);
    const auto ch = realize(load_tdl_profile("TDL-C", 300.0), 1);
    const double delay = propagation_delay_s(1000.0);
    for (auto _ : state) benchmark::DoNotOptimize(apply(tx, ch, delay));
}
BENCHMARK(BM_ChannelApply)->Arg(15)->Arg(60)->Unit(benchmark::kMicrosecond);

void BM_EstimateDelay(benchmark::State& state) {
    const auto num = Numerology::from_scs(scs_of(state));
    const auto tx = modulate(generate_pss(0), num);
    const auto rx = add_awgn(apply(tx, ChannelRealization::identity(), propagation_delay_s(1000.0)), 0.0, 2);
    const auto tpl = reference_template(0, num);
    for (auto _ : state) benchmark::DoNotOptimize(estimate_delay(rx, tpl));
}
BENCHMARK(BM_EstimateDelay)->Arg(15)->Arg(60)->Unit(benchmark::kMicrosecond);

void BM_Trial(benchmark::State& state) {
    TrialConfig cfg;
    cfg.numerology = Numerology::from_scs(scs_of(state));
    cfg.profile = load_tdl_profile("TDL-C", 300.0);
    cfg.snr = 0.0;
    const TrialRunner runner(cfg);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(runner.run(++seed));
}
BENCHMARK(BM_Trial)->Arg(15)->Arg(30)->Arg(60)->Unit(benchmark::kMicrosecond);

void BM_InBandChain(benchmark::State& state) {
    ptp::FactoryTopology topo;
    for (int i = 0; i < state.range(0); ++i) topo.nodes.push_back({"n" + std::to_string(i), {8.0 * (i + 1), 0.0}});
    ptp::HopParams hop;
    hop.stamp_clock.jitter_sigma_ns = 4.0;
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(ptp::distribute_in_band(topo, hop, ++seed));
}
BENCHMARK(BM_InBandChain)->Arg(10)->Arg(300);

}  // namespace

BENCHMARK_MAIN();
