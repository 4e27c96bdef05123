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

#ifndef PSCP_CUTS_HPP
#define PSCP_CUTS_HPP

#include "pscp/common.hpp"
#include "pscp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace pscp
{

/// A_i^w xbar for every scenario w of one row.
using CoverageVector = std::vector<double>;

/// Benders feasibility cut sum_j c_j x_j >= b of one row before any
/// strengthening. Coefficients are sparse and sorted by column.
struct CutBase
{
   int row = -1;
   SparseVector coeff;
   double rhs = 0.0;
};

/// Closed-form extreme ray of the dual subproblem, gamma normalized to 1.
struct DualRay
{
   std::vector<double> pi;
   std::vector<double> sigma;
   double gamma = 1.0;
};

enum class CutOrigin
{
   initial,
   benders,
   mir
};

inline const char*
to_string( CutOrigin o )
{
   switch( o )
   {
   case CutOrigin::initial:
      return "initial";
   case CutOrigin::benders:
      return "benders";
   case CutOrigin::mir:
      return "mir";
   }
   return "?";
}

/// Linear inequality coeff^T x >= rhs.
struct LinearRow
{
   SparseVector coeff;
   double rhs = 0.0;
};

/// Valid inequality over x in mixed form:
///
///    sum_{j in coeff} a_j x_j + sum_{j in complemented} g_j (1 - x_j) >= rhs
///
/// Initial and Benders cuts never have complemented terms and satisfy
/// a >= 0, rhs > 0. MIR cuts keep their (1 - x_j) terms.
struct CoveringCut
{
   SparseVector coeff;
   SparseVector complemented;
   double rhs = 0.0;
   CutOrigin origin = CutOrigin::benders;
   int row = -1;

   /// Same inequality with the complemented terms expanded.
   LinearRow
   folded() const
   {
      LinearRow out;
      out.rhs = rhs;
      out.coeff.reserve( coeff.size() + complemented.size() );
      std::size_t a = 0, b = 0;
      while( a < coeff.size() || b < complemented.size() )
      {
         if( b == complemented.size() ||
             ( a < coeff.size() && coeff[a].index < complemented[b].index ) )
            out.coeff.push_back( coeff[a++] );
         else if( a == coeff.size() ||
                  complemented[b].index < coeff[a].index )
         {
            out.coeff.push_back(
                { complemented[b].index, -complemented[b].value } );
            out.rhs -= complemented[b].value;
            ++b;
         }
         else
         {
            out.coeff.push_back( { coeff[a].index,
                                   coeff[a].value - complemented[b].value } );
            out.rhs -= complemented[b].value;
            ++a;
            ++b;
         }
      }
      return out;
   }

   double
   lhs( const std::vector<double>& x ) const
   {
      double v = dot( coeff, x );
      for( const Entry& e : complemented )
         v += e.value * ( 1.0 - x[e.index] );
      return v;
   }

   bool
   satisfied_by( const std::vector<double>& x, double slack = 1e-9 ) const
   {
      return lhs( x ) >= rhs - slack;
   }
};

/// max(rhs - a^T x, 0) / ||a||; infinite for an unsatisfiable 0 >= rhs > 0.
inline double
normalized_violation( const LinearRow& row, const std::vector<double>& x )
{
   double norm2 = 0.0;
   for( const Entry& e : row.coeff )
      norm2 += e.value * e.value;
   double gap = row.rhs - dot( row.coeff, x );
   if( gap <= 0.0 )
      return 0.0;
   if( norm2 == 0.0 )
      return std::numeric_limits<double>::infinity();
   return gap / std::sqrt( norm2 );
}

inline double
normalized_violation( const CoveringCut& cut, const std::vector<double>& x )
{
   return normalized_violation( cut.folded(), x );
}

/// Column-oriented evaluation of A_i^w xbar: only the columns in
/// `support_hint` are visited, each through its scenario list.
inline CoverageVector
eval_coverage( const ScenarioBlock& block, const std::vector<double>& xbar,
               const std::vector<int>& support_hint )
{
   CoverageVector cov( block.num_scenarios(), 0.0 );
   for( int j : support_hint )
   {
      const double xj = xbar[j];
      if( xj == 0.0 )
         continue;
      for( int w : block.col_index[j] )
         cov[w] += xj;
   }
   return cov;
}

inline std::vector<int>
support_of( const std::vector<double>& x )
{
   std::vector<int> out;
   for( int j = 0; j < static_cast<int>( x.size() ); ++j )
      if( x[j] != 0.0 )
         out.push_back( j );
   return out;
}

inline bool
covers_at_most_one( double coverage )
{
   return coverage <= 1.0 + tol::coverage;
}

/// Coefficients and right-hand side of the feasibility cut induced by the
/// coverage vector of a point. Scenarios with coverage <= 1 contribute
/// p A_i^w x, the others their weight as a constant.
inline CutBase
benders_cut_base( const ScenarioBlock& block, int row, int n,
                  const CoverageVector& cov )
{
   CutBase base;
   base.row = row;
   std::vector<double> acc( n, 0.0 );
   std::vector<char> touched( n, 0 );
   double over = 0.0;
   for( int w = 0; w < block.num_scenarios(); ++w )
   {
      const double p = block.prob[w];
      if( covers_at_most_one( cov[w] ) )
      {
         for( int j : block.scenarios[w] )
         {
            acc[j] += p;
            touched[j] = 1;
         }
      }
      else
         over += p;
   }
   for( int j = 0; j < n; ++j )
      if( touched[j] )
         base.coeff.push_back( { j, acc[j] } );
   base.rhs = 1.0 - block.epsilon - over;
   return base;
}

inline DualRay
dual_ray( const ScenarioBlock& block, const CoverageVector& cov )
{
   DualRay ray;
   ray.pi.resize( block.num_scenarios() );
   ray.sigma.resize( block.num_scenarios() );
   for( int w = 0; w < block.num_scenarios(); ++w )
   {
      if( covers_at_most_one( cov[w] ) )
         ray.pi[w] = block.prob[w];
      else
         ray.sigma[w] = block.prob[w];
   }
   return ray;
}

inline CoveringCut
as_cut( const CutBase& base, CutOrigin origin )
{
   CoveringCut cut;
   cut.coeff = base.coeff;
   cut.rhs = base.rhs;
   cut.origin = origin;
   cut.row = base.row;
   return cut;
}

struct Separation
{
   CutBase base;
   CoveringCut cut;
   double violation = 0.0;
   DualRay ray;
};

/// Separates the feasibility cut of one row at xbar. Returns nothing when
/// b <= 0 or the normalized violation does not exceed `tolerance`.
inline std::optional<Separation>
separate_row( const ScenarioBlock& block, int row, int n,
              const std::vector<double>& xbar,
              const std::vector<int>& support_hint,
              double tolerance = tol::violation )
{
   CoverageVector cov = eval_coverage( block, xbar, support_hint );
   CutBase base = benders_cut_base( block, row, n, cov );
   if( base.rhs <= 0.0 )
      return std::nullopt;
   double viol = normalized_violation( LinearRow{ base.coeff, base.rhs }, xbar );
   if( !( viol > tolerance ) )
      return std::nullopt;
   Separation sep;
   sep.cut = as_cut( base, CutOrigin::benders );
   sep.base = std::move( base );
   sep.violation = viol;
   sep.ray = dual_ray( block, cov );
   return sep;
}

inline std::optional<Separation>
separate_row( const ScenarioBlock& block, int row, int n,
              const std::vector<double>& xbar,
              double tolerance = tol::violation )
{
   return separate_row( block, row, n, xbar, support_of( xbar ), tolerance );
}

/// The cut induced by x = 0: sum_w p^w A_i^w x >= 1 - eps_i, accumulated
/// column by column.
inline CoveringCut
initial_cut( const ScenarioBlock& block, int row, int n )
{
   CoveringCut cut;
   cut.origin = CutOrigin::initial;
   cut.row = row;
   for( int j = 0; j < n; ++j )
   {
      if( block.col_index[j].empty() )
         continue;
      double c = 0.0;
      for( int w : block.col_index[j] )
         c += block.prob[w];
      cut.coeff.push_back( { j, c } );
   }
   cut.rhs = 1.0 - block.epsilon - 0.0;
   return cut;
}

/// Rows whose nonempty scenarios carry less than 1 - eps_i of the mass.
/// The instance is feasible iff this list is empty.
inline std::vector<int>
infeasibility_screen( const Instance& inst )
{
   std::vector<int> rows;
   for( int i = 0; i < inst.m; ++i )
   {
      const ScenarioBlock& b = inst.blocks[i];
      double covered = 0.0;
      for( int w = 0; w < b.num_scenarios(); ++w )
         if( !b.scenarios[w].empty() )
            covered += b.prob[w];
      if( covered < 1.0 - b.epsilon - tol::probability )
         rows.push_back( i );
   }
   return rows;
}

/// Coefficient strengthening: sum_j min(c_j, b) x_j >= b.
inline CoveringCut
strengthen_cut( const CutBase& base )
{
   CoveringCut cut;
   cut.row = base.row;
   cut.origin = CutOrigin::benders;
   cut.rhs = base.rhs;
   cut.coeff.reserve( base.coeff.size() );
   for( const Entry& e : base.coeff )
      cut.coeff.push_back( { e.index, std::min( e.value, base.rhs ) } );
   return cut;
}

/// MIR rounding function G(d) = floor(d) + min(f_d / f_beta, 1).
inline double
mir_g( double d, double f_beta )
{
   const double fl = std::floor( d );
   const double fd = d - fl;
   return fl + std::min( fd / f_beta, 1.0 );
}

/// Partition (L, U) of the columns plus the divisor delta.
struct MirContext
{
   /// upper[j] != 0 iff j is in U
   std::vector<char> upper;
   double delta = 1.0;

   double
   beta( const CutBase& base ) const
   {
      double b = base.rhs;
      for( const Entry& e : base.coeff )
         if( upper[e.index] )
            b -= e.value;
      return b / delta;
   }
};

inline MirContext
mir_context( int n, const std::vector<int>& upper_set, double delta )
{
   MirContext ctx;
   ctx.upper.assign( n, 0 );
   for( int j : upper_set )
      ctx.upper[j] = 1;
   ctx.delta = delta;
   return ctx;
}

/// MIR inequality of a cut base for the given partition and divisor:
///
///    sum_{j in L} G(c_j/delta) x_j + sum_{j in U} G(-c_j/delta)(1 - x_j)
///       >= ceil(beta)
///
/// Nothing is returned when f_beta is (numerically) zero.
inline std::optional<CoveringCut>
mir_cut( const CutBase& base, const MirContext& ctx )
{
   const double beta = ctx.beta( base );
   const double f_beta = beta - std::floor( beta );
   if( f_beta <= 1e-9 )
      return std::nullopt;

   CoveringCut cut;
   cut.row = base.row;
   cut.origin = CutOrigin::mir;
   cut.rhs = std::ceil( beta );
   for( const Entry& e : base.coeff )
   {
      if( ctx.upper[e.index] )
      {
         double g = mir_g( -e.value / ctx.delta, f_beta );
         if( g != 0.0 )
            cut.complemented.push_back( { e.index, g } );
      }
      else
      {
         double g = mir_g( e.value / ctx.delta, f_beta );
         if( g != 0.0 )
            cut.coeff.push_back( { e.index, g } );
      }
   }
   return cut;
}

struct MirResult
{
   CoveringCut cut;
   double violation = 0.0;
   double delta = 0.0;
};

/// Heuristic MIR separation: L = {xbar_j < 1/2}, U = the rest, and every
/// delta in {|c_j| : c_j != 0, xbar_j fractional}. Returns the most violated
/// candidate (smallest delta on ties) if it exceeds `tolerance`.
inline std::optional<MirResult>
best_mir_cut( const CutBase& base, const std::vector<double>& xbar,
              double tolerance = tol::violation )
{
   std::vector<double> deltas;
   for( const Entry& e : base.coeff )
   {
      const double xj = xbar[e.index];
      if( e.value != 0.0 && xj > tol::integrality &&
          xj < 1.0 - tol::integrality )
         deltas.push_back( std::abs( e.value ) );
   }
   if( deltas.empty() )
      return std::nullopt;
   std::sort( deltas.begin(), deltas.end() );
   deltas.erase( std::unique( deltas.begin(), deltas.end() ), deltas.end() );

   MirContext ctx;
   ctx.upper.assign( xbar.size(), 0 );
   for( std::size_t j = 0; j < xbar.size(); ++j )
      ctx.upper[j] = xbar[j] >= 0.5;

   std::optional<MirResult> best;
   for( double delta : deltas )
   {
      ctx.delta = delta;
      auto cut = mir_cut( base, ctx );
      if( !cut )
         continue;
      double viol = normalized_violation( *cut, xbar );
      if( !best || viol > best->violation )
         best = MirResult{ std::move( *cut ), viol, delta };
   }
   if( best && best->violation > tolerance )
      return best;
   return std::nullopt;
}

/// Cut storage with duplicate suppression. Cuts are keyed by row, their
/// folded coefficient pattern and rhs, rounded to 1e-9.
class CutPool
{
 public:
   /// Returns false if an equivalent cut is already stored.
   bool
   add( CoveringCut cut )
   {
      if( !keys_.insert( key( cut ) ).second )
         return false;
      cuts_.push_back( std::move( cut ) );
      return true;
   }

   bool
   contains( const CoveringCut& cut ) const
   {
      return keys_.count( key( cut ) ) != 0;
   }

   const std::vector<CoveringCut>&
   cuts() const
   {
      return cuts_;
   }

   std::size_t
   size() const
   {
      return cuts_.size();
   }

   std::size_t
   count( CutOrigin origin ) const
   {
      return static_cast<std::size_t>(
          std::count_if( cuts_.begin(), cuts_.end(),
                         [&]( const auto& c ) { return c.origin == origin; } ) );
   }

 private:
   static std::string
   key( const CoveringCut& cut )
   {
      LinearRow row = cut.folded();
      std::vector<std::int64_t> words;
      words.reserve( 2 * row.coeff.size() + 2 );
      words.push_back( cut.row );
      for( const Entry& e : row.coeff )
      {
         words.push_back( e.index );
         words.push_back( std::llround( e.value * 1e9 ) );
      }
      words.push_back( std::llround( row.rhs * 1e9 ) );
      std::string k( words.size() * sizeof( std::int64_t ), '\0' );
      std::memcpy( k.data(), words.data(), k.size() );
      return k;
   }

   std::vector<CoveringCut> cuts_;
   std::unordered_set<std::string> keys_;
};

} // namespace pscp

#endif
