#include "xsort/error.hpp"

namespace xsort {

void throw_contract(const std::string& what) { throw ContractViolation(what); }

}  // namespace xsort
