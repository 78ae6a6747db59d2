#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "wholder/field.hpp"
#include "wholder/params.hpp"
#include "wholder/seminorm.hpp"
#include "wholder/window.hpp"

namespace wholder {

/// Full: all weighted top terms except the pure D_{x_N}^{m-n} one for integer n. Hat: all of them.
/// Tilde / HatTilde: pure-derivative directional forms. Domain: boundary distance d(x) on a disk.
enum class NormVariant { Full, Hat, Tilde, HatTilde, Domain };

std::string variant_name(NormVariant v);
NormVariant variant_from_name(const std::string& s);

/// One constituent of a norm or of an estimate side.
struct TermRecipe {
  enum class Op { Sup, Seminorm, Zygmund };
  std::string group;
  std::string label;
  MultiIndex alpha;
  int time_order = 0;
  Op op = Op::Seminorm;
  SeminormSpec spec;             // pre_weight is the x_N (or d) power
  ZygmundVariant zygmund = ZygmundVariant::Tangential;
  std::string flag;              // non-empty when an edge case substitution was made

  [[nodiscard]] nlohmann::json to_json() const;
};

struct TermResult {
  TermRecipe recipe;
  SeminormEstimate estimate;
  [[nodiscard]] nlohmann::json to_json() const;
};

struct NormBreakdown {
  std::vector<TermResult> terms;
  double total = 0.0;
  [[nodiscard]] nlohmann::json to_json() const;
};

std::vector<TermRecipe> norm_terms(const SpaceParams& p, NormVariant v, bool parabolic, std::size_t dim);
/// The six left-hand groups G1..G6 of the main estimate (time groups dropped when !parabolic).
std::vector<TermRecipe> main_estimate_lhs_terms(const SpaceParams& p, bool parabolic, std::size_t dim);
/// Sum over i of the directional x_i seminorms of x_N^n D_{x_i}^m u, plus the D_t u time term.
std::vector<TermRecipe> main_estimate_rhs_terms(const SpaceParams& p, bool parabolic, std::size_t dim);
/// Left side of the general-domain estimate, with d(x) in place of x_N.
std::vector<TermRecipe> domain_lhs_terms(const SpaceParams& p, bool parabolic, std::size_t dim, bool vanishing);

SeminormEstimate evaluate_term(const FieldSource& src, const TermRecipe& r, const Window& w);
SeminormEstimate evaluate_term(const FieldSource& src, const TermRecipe& r, const PointCloud& c,
                               const DomainGeometry& g);

NormBreakdown evaluate_terms(const FieldSource& src, const std::vector<TermRecipe>& recipes, const Window& w);
NormBreakdown evaluate_terms(const FieldSource& src, const std::vector<TermRecipe>& recipes, const PointCloud& c,
                             const DomainGeometry& g);

NormBreakdown composite_norm(const FieldSource& u, const SpaceParams& p, NormVariant v, bool parabolic,
                             const Window& w);
NormBreakdown composite_norm(const Expression& u, const SpaceParams& p, NormVariant v, const Window& w);
/// Domain variant on a disk sample set.
NormBreakdown domain_norm(const FieldSource& u, const SpaceParams& p, bool parabolic, const DiskWindow& w);

/// Every term evaluated along a ladder, with per-term trails, classifications and group summaries.
struct LadderTerms {
  std::vector<TermResult> terms;
  std::map<std::string, Classification> groups;  // worst classification per group
  [[nodiscard]] nlohmann::json to_json() const;
};

LadderTerms evaluate_ladder(const FieldSource& src, const std::vector<TermRecipe>& recipes, const Window& base,
                            const Ladder& ladder, const GrowthOptions& opt = {});

LadderTerms main_estimate_lhs(const FieldSource& u, const SpaceParams& p, const Window& base, const Ladder& ladder,
                         const GrowthOptions& opt = {});
SeminormEstimate main_estimate_rhs(const FieldSource& u, const SpaceParams& p, const Window& w);

}  // namespace wholder
