#pragma once

// Body-file grammar, one body per line, key=value fields:
//   body ball radius=<r> center=<c1,...,cN>
//   body ellipsoid semiaxes=<s1,...,sN>
//   body tube m=<m> eps=<e> psi=quadratic diag=<w1,...,wm>
//   body tube m=<m> eps=<e> psi=radial coeffs=<c2,c4,...>
//   body implicit dim=<N> poly=<coef,e1,...,eN>;<coef,e1,...,eN>;...
// An implicit body may add box=<lo1,...,loN;hi1,...,hiN>; the default box is
// [-4, 4]^N and must contain the body.  Blank lines and lines starting with
// '#' are ignored.

#include <string>

#include "cutvol/body.hpp"

namespace cutvol {

// Parses a single body line (line/column used for error reporting).
BodyModel parse_body_line(const std::string& line, std::size_t line_no = 1);

// Reads the file and returns its body; the file must contain exactly one
// body line.
BodyModel parse_body_file(const std::string& path);

}  // namespace cutvol
