#pragma once

#include <cstddef>
#include <optional>

#include "lattice/core/rng.hpp"
#include "lattice/core/types.hpp"
#include "lattice/models/target_model.hpp"
#include "lattice/noise/noise.hpp"

namespace lattice {

/// Where a chain's stochastic gradient comes from: either the N/B-rescaled
/// minibatch estimator over the model's data, or the exact gradient plus
/// synthetic noise zeta = L s. The source is immutable; each chain gets its
/// own Estimator holding the per-chain scratch.
class GradientSource {
 public:
  static GradientSource minibatch(const TargetModel& model, std::size_t batch_size);
  static GradientSource synthetic(const TargetModel& model, SyntheticNoiseModel noise);

  const TargetModel& model() const noexcept { return *model_; }
  std::size_t batch_size() const noexcept { return batch_size_; }

  class Estimator {
   public:
    /// Writes the estimate of grad U(params) into out. Consumes randomness
    /// only from data_stream, and the amount consumed never depends on params.
    void operator()(const ParamVector& params, RandomStream& data_stream, ParamVector& out);

   private:
    friend class GradientSource;
    Estimator(const GradientSource& source);
    const GradientSource* source_;
    std::optional<MinibatchSampler> sampler_;
  };

  Estimator make_estimator() const { return Estimator(*this); }

 private:
  GradientSource(const TargetModel& model, std::size_t batch_size, std::optional<SyntheticNoiseModel> noise)
      : model_(&model), batch_size_(batch_size), noise_(std::move(noise)) {}

  const TargetModel* model_;
  std::size_t batch_size_;
  std::optional<SyntheticNoiseModel> noise_;
};

}  // namespace lattice
