#pragma once

#include "epf/featsel/data.hpp"
#include "epf/featsel/mask.hpp"
#include "epf/numkernel/rng.hpp"

namespace epf::featsel {

/// Single-hidden-layer network F(x) = sum_i w2_i sigmoid(w1_i . x + b_i).
/// w1 (features x L) and b are drawn once from U(-1, 1) over every input
/// feature and then frozen; a mask zeroes the unselected inputs and only w2
/// is refitted, by least squares.
class ElmModel {
public:
    ElmModel(std::size_t features, std::size_t hidden, numkernel::Rng& rng);

    // Fits w2 on the masked inputs. The mask must select at least one input.
    void fit(const Bits& mask, const Matrix& x, const Vector& y);
    Vector predict(const Matrix& x) const;
    double mse(const Matrix& x, const Vector& y) const;

    std::size_t hidden() const { return static_cast<std::size_t>(w1_.cols()); }
    const Matrix& input_weights() const { return w1_; }
    const Matrix& hidden_bias() const { return b_; }
    const Vector& output_weights() const { return w2_; }

private:
    Matrix hidden_activations(const Matrix& x) const;

    Matrix w1_;  // features x L
    Matrix b_;   // 1 x L
    Vector w2_;
    Bits mask_;
};

inline constexpr std::size_t kDefaultElmHidden = 50;

// Validation MSE of an ELM fitted on `train` with `mask`.
double elm_fitness(ElmModel& model, const Bits& mask, const SelectionData& train, const SelectionData& validation);

}  // namespace epf::featsel
