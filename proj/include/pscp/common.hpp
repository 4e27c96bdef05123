/* * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * */
/*                                                                           */
/*  pscp -- branch-and-Benders-cut for probabilistic set covering            */
/*                                                                           */
/*  Licensed under the Apache License, Version 2.0 (the "License");          */
/*  you may not use this file except in compliance with the License.         */
/*  You may obtain a copy of the License at                                  */
/*                                                                           */
/*      http://www.apache.org/licenses/LICENSE-2.0                           */
/*                                                                           */
/*  Unless required by applicable law or agreed to in writing, software      */
/*  distributed under the License is distributed on an "AS IS" BASIS,        */
/*  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. */
/*  See the License for the specific language governing permissions and      */
/*  limitations under the License.                                           */
/*                                                                           */
/* * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * */

#ifndef PSCP_COMMON_HPP
#define PSCP_COMMON_HPP

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

namespace pscp
{

/// Numerical tolerances shared by all modules.
namespace tol
{
/// normalized violation a cut must exceed to be emitted
inline constexpr double violation = 1e-6;
inline constexpr double integrality = 1e-6;
/// coverage A x <= 1 is tested against 1 + coverage
inline constexpr double coverage = 1e-9;
inline constexpr double prob_sum = 1e-9;
/// slack used when comparing a covered probability with 1 - eps
inline constexpr double probability = 1e-9;
inline constexpr double primal = 1e-7;
inline constexpr double dual = 1e-7;
inline constexpr double pivot = 1e-9;
} // namespace tol

/// Sparse vector entry.
struct Entry
{
   int index;
   double value;

   friend bool operator==( const Entry&, const Entry& ) = default;
};

using SparseVector = std::vector<Entry>;

class ParseError : public std::runtime_error
{
 public:
   using std::runtime_error::runtime_error;
};

/// Shortest decimal form that reads back to the same double.
inline std::string
format_double( double value )
{
   char buf[64];
   auto res = std::to_chars( buf, buf + sizeof( buf ), value );
   return std::string( buf, res.ptr );
}

/// Fixed 17 significant digits.
inline std::string
format_double17( double value )
{
   char buf[64];
   std::snprintf( buf, sizeof( buf ), "%.17g", value );
   return buf;
}

inline double
dot( const SparseVector& a, const std::vector<double>& x )
{
   double sum = 0.0;
   for( const Entry& e : a )
      sum += e.value * x[e.index];
   return sum;
}

} // namespace pscp

#endif
