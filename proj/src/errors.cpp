#include "fpt/errors.hpp"

namespace fpt {

void require_domain(bool cond, const std::string& what) {
  if (!cond) throw DomainError(what);
}

void require_valid(bool cond, const std::string& what) {
  if (!cond) throw ValidationError(what);
}

}  // namespace fpt
