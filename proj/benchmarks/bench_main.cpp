#include <gfcstab/analysis.hpp>
#include <gfcstab/electrical.hpp>
#include <gfcstab/scenario.hpp>
#include <gfcstab/simulator.hpp>

#include <benchmark/benchmark.h>

using namespace gfcstab;

namespace {

void BM_SimulateRocof(benchmark::State& state) {
	GfcParams gfc;
	gfc.feedback_mode = state.range(0) ? FeedbackMode::Virtual : FeedbackMode::Measured;
	const NetworkParams net;
	const auto signal = scenario::build_signal({scenario::RocofRamp{1.0, -1.0, 48.0}}, net.f_nominal);
	simulator::SimConfig cfg;
	cfg.stop_on_loss = false;
	for (auto _ : state)
		benchmark::DoNotOptimize(simulator::run(signal, gfc, net, cfg));
	state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.t_end / cfg.dt));
}
BENCHMARK(BM_SimulateRocof)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CurveSweep(benchmark::State& state) {
	const GfcParams gfc;
	const NetworkParams net;
	for (auto _ : state)
		benchmark::DoNotOptimize(electrical::sweep_curves(gfc, net, 1.0, static_cast<int>(state.range(0))));
	state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CurveSweep)->Arg(721)->Arg(10000);

void BM_VirtualPower(benchmark::State& state) {
	double delta = 0.0;
	for (auto _ : state) {
		benchmark::DoNotOptimize(electrical::virtual_power(delta, 1.0, 1.0, 0.3, 0.2, 1.1));
		delta = delta > 3.0 ? 0.0 : delta + 1e-3;
	}
}
BENCHMARK(BM_VirtualPower);

void BM_DynamicJumpMargin(benchmark::State& state) {
	const GfcParams gfc;
	const NetworkParams net;
	for (auto _ : state)
		benchmark::DoNotOptimize(analysis::dynamic_phase_jump_margin(0.9, gfc, net, FeedbackMode::Measured));
}
BENCHMARK(BM_DynamicJumpMargin)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
