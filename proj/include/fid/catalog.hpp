// Named constructors for the driving laws: characteristic triplets with the
// jump truncation 1_{|x|<=1}.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "fid/levy_measure.hpp"

namespace fid {

using Params = std::map<std::string, std::string>;

// Keys: gaussian(mean,var), delta(shift), poisson(rate), gamma(alpha,beta),
// cauchy(scale), sym_stable(alpha,scale), compound_poisson(rate,jumps),
// a_class(rho).  Atom-list values use "x:mass,x:mass" syntax.
LevyTriplet make_law(const std::string& name, const Params& params = {});

// All law names, in catalog order.
std::vector<std::string> catalog_laws();

double param_double(const Params& p, const std::string& key, double fallback);
std::vector<std::pair<double, double>> param_atoms(const Params& p, const std::string& key,
                                                   const std::string& fallback);

}  // namespace fid
