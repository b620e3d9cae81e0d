#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sg/exponents.hpp"
#include "sg/util.hpp"

namespace sg {

// radial profile g(|xi|) with its first two derivatives, valid for t >= t0.
// When t0 > 0 the density continues inward with max(0, a0 + b t^2), the
// unique quadratic matching value and slope at the junction.
struct RadialProfile {
    std::function<double(double)> g;
    std::function<double(double)> dg;
    std::function<double(double)> ddg;
    double t0 = 0.0;

    // Hessian eigenvalues of g(|xi|) at radius t > 0 are g''(t) and g'(t)/t
    double g1_exact(double t) const;
    double g2_exact(double t) const;
};

// closed-form envelopes for the Hessian eigenvalue range, valid from t_valid
struct GrowthHint {
    std::function<double(double)> lower;
    std::function<double(double)> upper;
    double t_valid = 0.0;
    bool has_lower = true;  // false when the form genuinely degenerates
};

class EnergyDensity {
  public:
    virtual ~EnergyDensity() = default;

    const std::string& name() const { return name_; }
    int dim() const { return dim_; }
    // radius below which the growth hypotheses are not claimed (0 = everywhere)
    double t0() const { return t0_; }
    // canonical constructor string, parse_integrand(id()) round-trips
    const std::string& id() const { return id_; }

    double eval(const Vec& xi) const;
    Vec grad(const Vec& xi) const;
    void grad(const Vec& xi, Vec& out) const;
    double hess_quadform(const Vec& xi, const Vec& lam) const;

    const GrowthHint* growth_hint() const { return hint_ ? &*hint_ : nullptr; }
    const RadialProfile* radial_profile() const { return radial_ ? &*radial_ : nullptr; }
    std::optional<ExponentSet> exponent_set() const { return exps_; }

  protected:
    EnergyDensity(std::string name, int dim, double t0, std::string id)
        : name_(std::move(name)), dim_(dim), t0_(t0), id_(std::move(id)) {}
    virtual double do_eval(const Vec& xi) const = 0;
    virtual void do_grad(const Vec& xi, Vec& out) const = 0;
    virtual double do_quadform(const Vec& xi, const Vec& lam) const = 0;

    std::optional<GrowthHint> hint_;
    std::optional<RadialProfile> radial_;
    std::optional<ExponentSet> exps_;

  private:
    std::string name_;
    int dim_;
    double t0_;
    std::string id_;
};

using Density = std::shared_ptr<const EnergyDensity>;

// Hessian quadratic forms of the structured families, exposed directly so
// they can be cross-checked against finite differences and used standalone.
// p are the per-axis exponents; sizes must agree.
double hess_quadform_aniso(const Vec& xi, const Vec& lam, const Vec& p);
double hess_quadform_sqrt_sum(const Vec& xi, const Vec& lam, const Vec& p);
double hess_quadform_degenerate(const Vec& xi, const Vec& lam, const Vec& p);

// catalog access. Parameters: scalars are size-1 vectors; every entry accepts
// n (space dimension, default 2) unless the exponent list fixes it.
Density catalog_lookup(const std::string& name, const std::map<std::string, Vec>& params);

// "name(key=value,key=[v1,v2],...)"
Density parse_integrand(const std::string& text);

struct CatalogEntryInfo {
    std::string name;
    std::string form;        // human-readable formula
    std::string constraints; // admissible parameter ranges
};
const std::vector<CatalogEntryInfo>& catalog_entries();

// user-supplied radial / separable densities built from a profile
Density make_radial(RadialProfile profile, int dim, const std::string& label);
Density make_separable(RadialProfile profile, int dim, const std::string& label);

// iterated logarithm ladder: L_1 = log(1+t), L_{k+1} = log(1 + L_k)
double iterated_log(double t, int k);

}  // namespace sg
