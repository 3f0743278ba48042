#include "lattice/samplers/gradient_source.hpp"

#include "lattice/core/error.hpp"
#include "lattice/samplers/step.hpp"

namespace lattice {

GradientSource GradientSource::minibatch(const TargetModel& model, std::size_t batch_size) {
  if (model.num_data() == 0) throw InvalidArgument("minibatch gradient source: model has no data");
  if (batch_size == 0 || batch_size > model.num_data()) {
    throw InvalidArgument("minibatch gradient source: batch size " + std::to_string(batch_size) +
                          " must lie in [1, " + std::to_string(model.num_data()) + "]");
  }
  return GradientSource(model, batch_size, std::nullopt);
}

GradientSource GradientSource::synthetic(const TargetModel& model, SyntheticNoiseModel noise) {
  const auto d = static_cast<Eigen::Index>(model.dim());
  if (noise.covariance_factor.rows() != d || noise.covariance_factor.cols() != d) {
    throw DimensionError("synthetic gradient source: noise factor must be d x d");
  }
  noise.distribution.validate();
  return GradientSource(model, 0, std::move(noise));
}

GradientSource::Estimator::Estimator(const GradientSource& source) : source_(&source) {
  if (!source.noise_) sampler_.emplace(source.model_->num_data(), source.batch_size_);
}

void GradientSource::Estimator::operator()(const ParamVector& params, RandomStream& data_stream, ParamVector& out) {
  if (sampler_) {
    const std::size_t* idx = sampler_->draw(data_stream);
    minibatch_grad_estimate_into(*source_->model_, params, {idx, sampler_->size()}, out);
    return;
  }
  out = source_->model_->full_gradient(params);
  out += sample_synthetic_noise(data_stream, *source_->noise_);
}

}  // namespace lattice
