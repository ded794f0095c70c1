#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cachecraft_cli/io.hpp"

namespace cachecraft::cli {

struct Options {
  std::string instance;
  std::string scheme;
  std::string spec;
  std::string out;
  bool dump_lp = false;
  /// Digits in decimal renderings; 0 drops them from JSON and writes exact fractions to CSV.
  int decimals = 6;
  /// Sweep worker threads; 0 picks the hardware concurrency.
  int jobs = 0;
};

enum class SweepMode { LoadVsM1, DctVsMtot, AllocVsMtot };

/// {"mode": "load-vs-m1", "K": 5, "N": 5, "rho": "3/4", "grid": {"start": "1/20", "stop": "1/2", "step": "1/20"}}
/// or {"mode": "dct-vs-mtot" | "alloc-vs-mtot", "K": 7, "C": [...], "grid": {...}}.
/// In load-vs-m1 the grid value is m_1 and m_{k+1} = m_k / rho.
struct SweepSpec {
  SweepMode mode = SweepMode::LoadVsM1;
  int K = 0;
  int N = 0;
  Rational rho{1};
  std::vector<Rational> C;
  Rational start, stop, step;

  /// Grid points start, start+step, ... up to and including stop.
  std::vector<Rational> grid() const;
};

SweepSpec parse_sweep_spec(const std::string& text, const std::string& name);

/// Optimal load, every lower bound and any applicable closed form, plus the optimal scheme.
/// When `lp_dump` is set the LP text is written there before solving.
Json cmd_load(const InstanceFile& inst, const Options& options, std::ostream* lp_dump = nullptr);

/// Optimal allocation for a capacity instance, its scheme, and the reference allocations.
Json cmd_allocate(const InstanceFile& inst, const Options& options);

struct VerifyResult {
  Json report;
  bool pass = false;
};

/// Feasibility, side-information and packet-level decoding checks for a scheme document.
/// The instance may omit "m" when the scheme document carries it.
VerifyResult cmd_verify(const InstanceFile& inst, const Json& scheme_doc, const std::string& scheme_name,
                        const Options& options);

/// CSV text with a header line and one row per grid point, in grid order.
std::string cmd_sweep(const SweepSpec& spec, const Options& options);

/// Runs a verb, printing JSON or CSV to `out` and diagnostics to `err`.
/// Exit codes: 0 success, 1 invalid input, 2 infeasible or failed verification, 3 resource limit.
int run(const std::string& verb, const Options& options, std::ostream& out, std::ostream& err);

}  // namespace cachecraft::cli
