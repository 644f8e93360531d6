// Build a model in code, check the hypotheses, classify it and print its JSON.
#include <iostream>

#include "ecoepi/ecoepi.hpp"

int main() {
  using namespace ecoepi;
  EcoEpiModel m{"custom-holling",
                TimeCoefficient::constant(0.8),               // a
                TimeCoefficient::sinusoid(0.6, 0.5),          // beta
                TimeCoefficient::constant(0.5),               // eta
                TimeCoefficient::constant(0.2),               // c
                TimeCoefficient::constant(0.3),               // gamma
                TimeCoefficient::constant(0.5),               // theta
                response::HollingII{1.0, 0.5, Axis::S},       // f
                response::Identity{Axis::P},                  // g
                SusceptibleVitalDynamics::affine(TimeCoefficient::constant(1.0), TimeCoefficient::constant(0.4)),
                PredatorVitalRate::decay(TimeCoefficient::constant(0.1), TimeCoefficient::constant(0.3)),
                1.0};

  const auto val = validate_hypotheses(m);
  std::cout << "standing hypotheses: " << (val.standing_hypotheses_hold() ? "hold" : "violated") << '\n';
  std::cout << classify(m).to_text() << '\n';

  const auto camp = run_campaign(m, default_initial_conditions(), {}, CampaignOptions{});
  for (const auto& r : camp.runs)
    std::cout << "ic (" << r.ic[0] << ", " << r.ic[1] << ", " << r.ic[2] << "): tail I in [" << r.tail_min_I << ", "
              << r.tail_max_I << "] " << empirical_name(r.empirical) << '\n';

  std::cout << '\n' << serialize_model(m);
}
