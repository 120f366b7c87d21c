#pragma once

// Time steppers for the relaxed exponential SAV schemes.

#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "resav/models.hpp"
#include "resav/savkernel.hpp"
#include "resav/spectral.hpp"
#include "resav/vesicle.hpp"

namespace resav {

/// Right-hand side added to each component equation, evaluated at t^{n+1}.
using Forcing = std::function<std::vector<SpectralField>(double t)>;

struct SchemeOptions {
  bool relaxed = true;
  double gamma = 1.0;    ///< first-kind dissipation parameter in [0,1]
  double scale_c = 0.0;  ///< 0 selects max(1, |E(phi^0)|)
  bool strict = false;
  bool dealias = false;
  Forcing forcing;
};

struct Level {
  std::vector<SpectralField> phi_hat;
  double log_r = 0.0;
  double log_r2 = 0.0;
  std::optional<SpectralField> pressure;
};

struct History {
  std::deque<Level> levels;  ///< newest first
  double t = 0.0;
  long step_index = 0;
  double scale_c = 1.0;

  const Level& newest() const { return levels.front(); }
};

/// Per-step diagnostics. Quantities that do not apply to a scheme are 0.
struct StepReport {
  long step = 0;
  double t = 0.0;
  double theta0 = 0.0;
  double gamma = 0.0;
  double xi = 1.0;
  double log_r = 0.0;
  double log_r2 = 0.0;
  double e_original = 0.0;
  double e_modified = 0.0;
  double dissipation = 0.0;
  double mass = 0.0;
  double divergence = 0.0;
  int relax_case = 0;
};

// ---------------------------------------------------------------- steps
// Each step advances the history in place by dt and returns its report.

StepReport step_resav1_bdfk(const Model& model, History& hist, double dt, int k,
                            const SchemeOptions& opts);
StepReport step_resav2_bdfk(const Model& model, History& hist, double dt, int k,
                            const SchemeOptions& opts);
StepReport step_resav1_cn_multi(const MultiComponentModel& model, History& hist, double dt,
                                const SchemeOptions& opts);
StepReport step_rmesav1_cn(const VesicleModel& model, History& hist, double dt,
                           const SchemeOptions& opts);

// ------------------------------------------------------- initial states

History initial_history_esav1(const Model& model, const Field& phi0, const SchemeOptions& opts);
History initial_history_esav2(const Model& model, const Field& phi0, const SchemeOptions& opts);
History initial_history_multi(const MultiComponentModel& model, const std::vector<Field>& phi0,
                              const SchemeOptions& opts);
History initial_history_mesav(const VesicleModel& model, const Field& phi0,
                              const SchemeOptions& opts);

// ------------------------------------------------------------- drivers

/// Advances a history by one step of the given order.
using StepFn = std::function<StepReport(History&, double dt, int order)>;
/// Diagnostics of the newest level without taking a step.
using DescribeFn = std::function<StepReport(const History&)>;

struct SchemeKit {
  std::string name;
  int order = 1;  ///< history levels required before a regular step
  StepFn step;
  DescribeFn describe;
};

SchemeKit resav1_bdf_kit(ModelPtr model, int k, SchemeOptions opts);
SchemeKit resav2_bdf_kit(ModelPtr model, int k, SchemeOptions opts);
SchemeKit resav1_cn_kit(std::shared_ptr<const MultiComponentModel> model, SchemeOptions opts);
SchemeKit rmesav1_cn_kit(std::shared_ptr<const VesicleModel> model, SchemeOptions opts);

/// Starting levels t = dt .. (k-1) dt for a k-level scheme, obtained from a
/// recursively bootstrapped order k-1 run on substeps dt/m with
/// m = ceil(dt^{-1/(k-1)}) (m = 1 for k = 2). Returned newest last.
std::vector<std::pair<Level, StepReport>> bootstrap(const History& start, const StepFn& step,
                                                    double dt, int k);

/// Owns a history and advances it, bootstrapping on the first step.
class Stepper {
 public:
  Stepper(SchemeKit kit, History initial, double dt);

  StepReport step();
  const History& history() const noexcept { return hist_; }
  StepReport describe() const { return kit_.describe(hist_); }
  double t() const noexcept { return hist_.t; }
  double dt() const noexcept { return dt_; }
  const SchemeKit& kit() const noexcept { return kit_; }

 private:
  SchemeKit kit_;
  History hist_;
  double dt_;
  bool bootstrapped_ = false;
  std::deque<std::pair<Level, StepReport>> pending_;
};

/// Helpers shared with the Navier-Stokes steppers.
SpectralField combine_levels(const History& hist, std::span<const double> weights, int comp);
double combine_log(const History& hist, std::span<const double> weights, bool second = false);
void push_level(History& hist, Level level, double dt, std::size_t keep);
[[noreturn]] void raise_invariant(long step, const std::string& what);

}  // namespace resav
