#pragma once

#include <string>
#include <vector>

#include "mcvae/geom/model.hpp"

namespace mcvae::prod {

enum class CurvMode { Fixed, Learnable, Universal };

struct Component {
  geom::Model model;
  int dim = 0;
  CurvMode mode = CurvMode::Fixed;
  double init_k = 0.0;

  int ambient() const {
    return dim + ((model == geom::Model::H || model == geom::Model::S) ? 1 : 0);
  }
  // Curvature sign a learnable component is pinned to.
  double sign() const { return init_k < 0.0 ? -1.0 : 1.0; }
};

// Ordered list of component spaces making up the product latent space.
class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<Component> cs);

  // Grammar: comma-separated `<model><dim>[*<count>][@<K|learn|univ>]`
  // (the *count and @spec suffixes may appear in either order),
  // models in {e,h,s,p,d,u}. Examples: "e6", "u2*3", "h2@-1,s2@1,e2".
  static Signature parse(const std::string& text);

  const std::vector<Component>& components() const { return comps_; }
  std::size_t size() const { return comps_.size(); }
  const Component& operator[](std::size_t i) const { return comps_[i]; }

  int latent_dim() const { return latent_dim_; }
  int ambient_dim() const { return ambient_dim_; }
  int latent_offset(std::size_t i) const { return latent_off_[i]; }
  int ambient_offset(std::size_t i) const { return ambient_off_[i]; }
  bool has_universal() const;
  std::string str() const;

 private:
  std::vector<Component> comps_;
  std::vector<int> latent_off_, ambient_off_;
  int latent_dim_ = 0, ambient_dim_ = 0;
};

}  // namespace mcvae::prod
