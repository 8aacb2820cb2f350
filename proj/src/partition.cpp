#include "z2thermo/partition.hpp"

#include <cmath>
#include <sstream>

namespace z2thermo {

namespace {

Region classify_one(const LabeledTerm& t, const DofLayout& layout) {
  switch (t.family) {
    case TermFamily::hopping: {
      int inside = 0;
      for (const auto& f : t.factors) inside += layout.in_system(f.dof) ? 1 : 0;
      if (inside == static_cast<int>(t.factors.size())) return Region::system;
      if (inside == 0) return Region::reservoir;
      return Region::interaction;
    }
    case TermFamily::electric: {
      const DofId link = layout.link(t.index);
      if (layout.in_system(link)) return Region::system;
      const bool touches = layout.in_system(layout.site(t.index)) || layout.in_system(layout.site(t.index + 1));
      return touches ? Region::interaction : Region::reservoir;
    }
    case TermFamily::mass:
    case TermFamily::chemical:
    case TermFamily::constant:
      return layout.in_system(layout.site(t.index)) ? Region::system : Region::reservoir;
  }
  return Region::unset;
}

}  // namespace

std::vector<LabeledTerm> classify(std::vector<LabeledTerm> terms, const DofLayout& layout) {
  for (auto& t : terms) {
    validate_factors(t.factors, layout);
    t.region = classify_one(t, layout);
  }
  return terms;
}

std::vector<Product> region_products(std::span<const LabeledTerm> terms, Region region) {
  std::vector<Product> out;
  for (const auto& t : terms) {
    if (t.region != region) continue;
    for (auto& p : t.products()) out.push_back(std::move(p));
  }
  return out;
}

std::vector<ComponentMinimum> shift_components(const ModelParams& params) {
  ModelParams zero = params;
  zero.shift = 0.0;
  const DofLayout layout(zero.n_sites, zero.n_system);
  const auto sector = physical_sector(layout);
  const auto h = partition_model<double>(zero, sector, layout);
  const int n_s = zero.n_system;
  const int n_r = zero.n_sites - zero.n_system;
  return {
      {"H_S(0-)", herm_eig(h.system_factor_initial).min_eigenvalue(), n_s},
      {"H_S(0+)", herm_eig(h.system_factor_final).min_eigenvalue(), n_s},
      {"H_R", herm_eig(h.reservoir_factor).min_eigenvalue(), n_r},
      {"H_SR(0-)", herm_eig(h.total_initial).min_eigenvalue(), zero.n_sites},
      {"H_SR(0+)", herm_eig(h.total_final).min_eigenvalue(), zero.n_sites},
  };
}

double minimal_shift(std::span<const ComponentMinimum> components, double granularity) {
  if (!(granularity > 0.0)) throw InvalidInput("minimal_shift: granularity must be positive");
  double c = 0.0;
  for (const auto& comp : components) {
    if (comp.lambda_min >= 0.0) continue;
    c = std::max(c, std::ceil(-comp.lambda_min / comp.n_sites / granularity) * granularity);
  }
  return c;
}

ShiftChoice choose_shift(const ModelParams& params, double granularity) {
  ShiftChoice choice;
  choice.components = shift_components(params);
  if (!params.shift) {
    choice.value = minimal_shift(choice.components, granularity);
    return choice;
  }
  choice.automatic = false;
  choice.value = *params.shift;
  for (const auto& comp : choice.components) {
    const double shifted = comp.lambda_min + choice.value * comp.n_sites;
    if (shifted < 0.0) {
      std::ostringstream msg;
      msg << "c = " << choice.value << " leaves " << comp.name << " with lowest eigenvalue " << shifted;
      choice.warnings.push_back(msg.str());
    }
  }
  return choice;
}

ShiftChoice choose_shift(const ModelParams& params, std::span<const double> mu_finals, double granularity) {
  if (mu_finals.empty()) return choose_shift(params, granularity);
  std::vector<ShiftChoice> choices;
  for (const double mu : mu_finals) {
    ModelParams p = params;
    p.mu_final = mu;
    choices.push_back(choose_shift(p, granularity));
  }
  auto best = *std::max_element(choices.begin(), choices.end(),
                                [](const auto& a, const auto& b) { return a.value < b.value; });
  best.warnings.clear();
  for (const auto& c : choices) best.warnings.insert(best.warnings.end(), c.warnings.begin(), c.warnings.end());
  return best;
}

}  // namespace z2thermo
