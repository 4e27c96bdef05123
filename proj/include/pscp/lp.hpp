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

#ifndef PSCP_LP_HPP
#define PSCP_LP_HPP

#include "pscp/common.hpp"
#include "pscp/cuts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pscp
{

/// min c^T x  s.t.  rows (a^T x >= rhs),  lo <= x <= hi.
struct LpModel
{
   std::vector<double> objective;
   std::vector<double> lo;
   std::vector<double> hi;
   std::vector<LinearRow> rows;

   LpModel() = default;

   explicit LpModel( std::vector<double> c )
       : objective( std::move( c ) ), lo( objective.size(), 0.0 ),
         hi( objective.size(), 1.0 )
   {
   }

   int
   num_cols() const
   {
      return static_cast<int>( objective.size() );
   }

   int
   num_rows() const
   {
      return static_cast<int>( rows.size() );
   }

   void
   add_row( LinearRow row )
   {
      for( const Entry& e : row.coeff )
         if( e.index < 0 || e.index >= num_cols() )
            throw std::invalid_argument( "row references unknown column" );
      rows.push_back( std::move( row ) );
   }

   void
   add_rows( const std::vector<CoveringCut>& cuts )
   {
      for( const CoveringCut& c : cuts )
         add_row( c.folded() );
   }

   void
   fix_var( int j, double value )
   {
      if( value != 0.0 && value != 1.0 )
         throw std::invalid_argument( "variables can only be fixed to 0 or 1" );
      lo.at( j ) = hi.at( j ) = value;
   }

   void
   unfix_var( int j )
   {
      lo.at( j ) = 0.0;
      hi.at( j ) = 1.0;
   }
};

enum class LpStatus
{
   optimal,
   infeasible,
   iteration_limit
};

/// Warm-start token: basic structurals, rows whose slack is nonbasic and
/// the bound of each nonbasic structural.
struct LpBasis
{
   std::vector<int> basic_cols;
   std::vector<int> tight_rows;
   std::vector<char> at_upper;

   bool
   empty() const
   {
      return at_upper.empty();
   }
};

struct LpSolution
{
   LpStatus status = LpStatus::iteration_limit;
   std::vector<double> x;
   double obj = 0.0;
   LpBasis basis;
   /// for infeasible models: row multipliers of the combination that proves
   /// infeasibility (row index, multiplier); index -1 - j denotes a bound
   SparseVector certificate;
   int iterations = 0;
};

struct LpOptions
{
   int max_iterations = -1; ///< -1: 20000 + 20 (rows + cols)
   /// consecutive degenerate pivots before switching to Bland's rule
   int degenerate_limit = 50;
   int refactor_interval = 64;
};

namespace detail
{

/// Bounded dual simplex. Slacks s_i = a_i x - b_i >= 0. A basis is given by
/// the basic structurals J_B and the tight rows T (nonbasic slacks) with
/// |J_B| = |T|; all other slacks are basic. Only the kernel K = A[T, J_B] is
/// factored; its explicit inverse is updated per pivot and periodically
/// recomputed.
class DualSimplex
{
 public:
   DualSimplex( const LpModel& model, const LpOptions& opt )
       : model_( model ), opt_( opt ), n_( model.num_cols() ),
         r_( model.num_rows() )
   {
      max_iter_ = opt.max_iterations >= 0 ? opt.max_iterations
                                          : 20000 + 20 * ( n_ + r_ );
   }

   LpSolution
   solve( const LpBasis* warm )
   {
      LpSolution sol;
      for( int j = 0; j < n_; ++j )
         if( model_.lo[j] > model_.hi[j] )
         {
            sol.status = LpStatus::infeasible;
            sol.certificate.push_back( { -1 - j, 1.0 } );
            return sol;
         }

      if( !( warm && !warm->empty() && load( *warm ) ) )
         cold_start();

      x_.assign( n_, 0.0 );
      slack_.assign( r_, 0.0 );
      bool bland = false;
      int degenerate = 0;
      double last_obj = -std::numeric_limits<double>::infinity();
      int since_refactor = 0;

      for( int iter = 0;; ++iter )
      {
         sol.iterations = iter;
         if( iter >= max_iter_ )
         {
            sol.status = LpStatus::iteration_limit;
            finish( sol );
            return sol;
         }
         if( since_refactor >= opt_.refactor_interval )
         {
            if( !refactor() )
            {
               cold_start();
               bland = true;
            }
            since_refactor = 0;
         }

         compute_duals();
         fix_dual_infeasibility();
         compute_primal();

         double obj = 0.0;
         for( int j = 0; j < n_; ++j )
            obj += model_.objective[j] * x_[j];
         if( obj <= last_obj + 1e-12 )
         {
            if( ++degenerate > opt_.degenerate_limit )
               bland = true;
         }
         else
            degenerate = 0;
         last_obj = std::max( last_obj, obj );

         int leave = choose_leaving( bland );
         if( leave < 0 )
         {
            sol.status = LpStatus::optimal;
            finish( sol );
            return sol;
         }

         compute_pivot_row( leave );
         bool below = leaving_below( leave );
         int enter = ratio_test( below, bland );
         if( enter < 0 )
         {
            sol.status = LpStatus::infeasible;
            certificate( leave, sol );
            finish( sol );
            return sol;
         }
         pivot( leave, enter, below );
         ++since_refactor;
      }
   }

 private:
   enum : char
   {
      kBasic = 0,
      kLower = 1,
      kUpper = 2
   };

   // variable ids: [0, n) structurals, n + i slack of row i

   double&
   kinv( int p, int t )
   {
      return kinv_[static_cast<std::size_t>( p ) * stride_ + t];
   }

   void
   ensure_capacity( int k )
   {
      if( k <= stride_ )
         return;
      int ns = std::max( k, 2 * stride_ + 8 );
      std::vector<double> next( static_cast<std::size_t>( ns ) * ns, 0.0 );
      for( int p = 0; p < kdim(); ++p )
         for( int t = 0; t < kdim(); ++t )
            next[static_cast<std::size_t>( p ) * ns + t] = kinv( p, t );
      kinv_.swap( next );
      stride_ = ns;
   }

   int
   kdim() const
   {
      return static_cast<int>( basic_.size() );
   }

   double
   coef( int row, int j ) const
   {
      const auto& c = model_.rows[row].coeff;
      auto it = std::lower_bound(
          c.begin(), c.end(), j,
          []( const Entry& e, int idx ) { return e.index < idx; } );
      return it != c.end() && it->index == j ? it->value : 0.0;
   }

   void
   cold_start()
   {
      status_.assign( n_, kLower );
      for( int j = 0; j < n_; ++j )
         if( model_.objective[j] < 0.0 && model_.lo[j] < model_.hi[j] )
            status_[j] = kUpper;
      posb_.assign( n_, -1 );
      post_.assign( r_, -1 );
      basic_.clear();
      tight_.clear();
      stride_ = 0;
      kinv_.clear();
   }

   bool
   load( const LpBasis& b )
   {
      if( static_cast<int>( b.at_upper.size() ) != n_ ||
          b.basic_cols.size() != b.tight_rows.size() )
         return false;
      cold_start();
      for( int j : b.basic_cols )
      {
         if( j < 0 || j >= n_ || posb_[j] >= 0 )
            return false;
         posb_[j] = static_cast<int>( basic_.size() );
         basic_.push_back( j );
         status_[j] = kBasic;
      }
      for( int i : b.tight_rows )
      {
         if( i < 0 || i >= r_ || post_[i] >= 0 )
            return false;
         post_[i] = static_cast<int>( tight_.size() );
         tight_.push_back( i );
      }
      for( int j = 0; j < n_; ++j )
         if( status_[j] != kBasic )
            status_[j] = b.at_upper[j] ? kUpper : kLower;
      if( !refactor() )
      {
         cold_start();
         return false;
      }
      // a tight row with a negative dual cannot be repaired by a bound flip
      compute_duals();
      for( int t = 0; t < kdim(); ++t )
         if( y_[t] < -1e-6 )
         {
            cold_start();
            return false;
         }
      return true;
   }

   /// Gauss-Jordan inverse of K with partial pivoting.
   bool
   refactor()
   {
      const int k = kdim();
      stride_ = std::max( stride_, k );
      kinv_.assign( static_cast<std::size_t>( stride_ ) * stride_, 0.0 );
      if( k == 0 )
         return true;
      // augmented [K | I], K[t][p]
      std::vector<double> a( static_cast<std::size_t>( k ) * 2 * k, 0.0 );
      auto at = [&]( int row, int col ) -> double& {
         return a[static_cast<std::size_t>( row ) * 2 * k + col];
      };
      for( int t = 0; t < k; ++t )
      {
         for( const Entry& e : model_.rows[tight_[t]].coeff )
            if( posb_[e.index] >= 0 )
               at( t, posb_[e.index] ) = e.value;
         at( t, k + t ) = 1.0;
      }
      for( int col = 0; col < k; ++col )
      {
         int piv = col;
         for( int row = col + 1; row < k; ++row )
            if( std::abs( at( row, col ) ) > std::abs( at( piv, col ) ) )
               piv = row;
         if( std::abs( at( piv, col ) ) < 1e-11 )
            return false;
         if( piv != col )
            for( int c = 0; c < 2 * k; ++c )
               std::swap( at( piv, c ), at( col, c ) );
         double inv = 1.0 / at( col, col );
         for( int c = 0; c < 2 * k; ++c )
            at( col, c ) *= inv;
         for( int row = 0; row < k; ++row )
         {
            if( row == col )
               continue;
            double f = at( row, col );
            if( f == 0.0 )
               continue;
            for( int c = 0; c < 2 * k; ++c )
               at( row, c ) -= f * at( col, c );
         }
      }
      // K^{-1}: rows indexed by basic position, columns by tight position
      for( int p = 0; p < k; ++p )
         for( int t = 0; t < k; ++t )
            kinv( p, t ) = at( p, k + t );
      return true;
   }

   void
   compute_duals()
   {
      const int k = kdim();
      y_.assign( k, 0.0 );
      for( int p = 0; p < k; ++p )
      {
         double cb = model_.objective[basic_[p]];
         if( cb == 0.0 )
            continue;
         for( int t = 0; t < k; ++t )
            y_[t] += cb * kinv( p, t );
      }
      d_ = model_.objective;
      for( int t = 0; t < k; ++t )
      {
         if( y_[t] == 0.0 )
            continue;
         for( const Entry& e : model_.rows[tight_[t]].coeff )
            d_[e.index] -= y_[t] * e.value;
      }
   }

   /// Boxed nonbasic structurals are moved to the bound their reduced cost
   /// prefers.
   void
   fix_dual_infeasibility()
   {
      for( int j = 0; j < n_; ++j )
      {
         if( status_[j] == kBasic || model_.lo[j] == model_.hi[j] )
            continue;
         if( status_[j] == kLower && d_[j] < -tol::dual )
            status_[j] = kUpper;
         else if( status_[j] == kUpper && d_[j] > tol::dual )
            status_[j] = kLower;
      }
   }

   void
   compute_primal()
   {
      const int k = kdim();
      for( int j = 0; j < n_; ++j )
         if( status_[j] != kBasic )
            x_[j] = status_[j] == kUpper ? model_.hi[j] : model_.lo[j];
      std::vector<double> rhs( k );
      for( int t = 0; t < k; ++t )
      {
         double v = model_.rows[tight_[t]].rhs;
         for( const Entry& e : model_.rows[tight_[t]].coeff )
            if( status_[e.index] != kBasic )
               v -= e.value * x_[e.index];
         rhs[t] = v;
      }
      for( int p = 0; p < k; ++p )
      {
         double v = 0.0;
         for( int t = 0; t < k; ++t )
            v += kinv( p, t ) * rhs[t];
         x_[basic_[p]] = v;
      }
      for( int i = 0; i < r_; ++i )
         slack_[i] = post_[i] >= 0
                         ? 0.0
                         : dot( model_.rows[i].coeff, x_ ) - model_.rows[i].rhs;
   }

   int
   choose_leaving( bool bland ) const
   {
      int best = -1;
      double best_inf = 0.0;
      for( int p = 0; p < kdim(); ++p )
      {
         int j = basic_[p];
         double inf = std::max( model_.lo[j] - x_[j], x_[j] - model_.hi[j] );
         if( inf > tol::primal )
         {
            if( bland )
            {
               if( best < 0 || j < best )
                  best = j;
            }
            else if( inf > best_inf )
            {
               best_inf = inf;
               best = j;
            }
         }
      }
      for( int i = 0; i < r_; ++i )
      {
         if( post_[i] >= 0 || slack_[i] >= -tol::primal )
            continue;
         if( bland )
         {
            if( best < 0 )
               best = n_ + i;
            continue;
         }
         double inf = -slack_[i];
         if( inf > best_inf )
         {
            best_inf = inf;
            best = n_ + i;
         }
      }
      return best;
   }

   bool
   leaving_below( int leave ) const
   {
      if( leave >= n_ )
         return true;
      return x_[leave] < model_.lo[leave];
   }

   /// alpha_ over structurals and rho_ over tight positions for the row of
   /// the leaving variable.
   void
   compute_pivot_row( int leave )
   {
      const int k = kdim();
      rho_.assign( k, 0.0 );
      alpha_.assign( n_, 0.0 );
      if( leave >= n_ )
      {
         const auto& row = model_.rows[leave - n_].coeff;
         for( const Entry& e : row )
         {
            alpha_[e.index] = e.value;
            int p = posb_[e.index];
            if( p < 0 )
               continue;
            for( int t = 0; t < k; ++t )
               rho_[t] += e.value * kinv( p, t );
         }
      }
      else
      {
         int p = posb_[leave];
         for( int t = 0; t < k; ++t )
            rho_[t] = kinv( p, t );
      }
      for( int t = 0; t < k; ++t )
      {
         if( rho_[t] == 0.0 )
            continue;
         for( const Entry& e : model_.rows[tight_[t]].coeff )
            alpha_[e.index] -= rho_[t] * e.value;
      }
      for( int j : basic_ )
         alpha_[j] = 0.0;
   }

   /// Returns the entering variable id or -1 if the dual is unbounded.
   int
   ratio_test( bool below, bool bland ) const
   {
      const int k = kdim();
      auto eligible = [&]( double alpha, bool at_upper ) {
         if( std::abs( alpha ) <= tol::pivot )
            return false;
         bool pos = alpha > 0.0;
         return below ? ( pos != at_upper ) : ( pos == at_upper );
      };

      double bound = std::numeric_limits<double>::infinity();
      for( int j = 0; j < n_; ++j )
      {
         if( status_[j] == kBasic || model_.lo[j] == model_.hi[j] ||
             !eligible( alpha_[j], status_[j] == kUpper ) )
            continue;
         double slack = bland ? 0.0 : tol::dual;
         bound = std::min( bound,
                           ( std::abs( d_[j] ) + slack ) / std::abs( alpha_[j] ) );
      }
      for( int t = 0; t < k; ++t )
      {
         if( !eligible( rho_[t], false ) )
            continue;
         double slack = bland ? 0.0 : tol::dual;
         bound = std::min( bound, ( std::max( y_[t], 0.0 ) + slack ) /
                                      std::abs( rho_[t] ) );
      }
      if( bound == std::numeric_limits<double>::infinity() )
         return -1;

      int best = -1;
      double best_key = -1.0;
      auto consider = [&]( int id, double dj, double alpha ) {
         double ratio = std::max( dj, 0.0 ) / std::abs( alpha );
         if( bland )
         {
            if( ratio <= bound + 1e-12 && ( best < 0 || id < best ) )
               best = id;
            return;
         }
         if( ratio <= bound && std::abs( alpha ) > best_key )
         {
            best_key = std::abs( alpha );
            best = id;
         }
      };
      for( int j = 0; j < n_; ++j )
      {
         if( status_[j] == kBasic || model_.lo[j] == model_.hi[j] ||
             !eligible( alpha_[j], status_[j] == kUpper ) )
            continue;
         consider( j, std::abs( d_[j] ), alpha_[j] );
      }
      for( int t = 0; t < k; ++t )
         if( eligible( rho_[t], false ) )
            consider( n_ + tight_[t], y_[t], rho_[t] );
      return best;
   }

   void
   pivot( int leave, int enter, bool below )
   {
      const int k = kdim();
      if( leave >= n_ )
      {
         const int q = leave - n_;
         if( enter < n_ )
         {
            // grow: row q becomes tight, column enter becomes basic
            const int j = enter;
            std::vector<double> u( k ), ku( k, 0.0 );
            for( int t = 0; t < k; ++t )
               u[t] = coef( tight_[t], j );
            for( int p = 0; p < k; ++p )
               for( int t = 0; t < k; ++t )
                  ku[p] += kinv( p, t ) * u[t];
            const double sigma = alpha_[j];
            ensure_capacity( k + 1 );
            for( int p = 0; p < k; ++p )
               for( int t = 0; t < k; ++t )
                  kinv( p, t ) += ku[p] * rho_[t] / sigma;
            for( int p = 0; p < k; ++p )
               kinv( p, k ) = -ku[p] / sigma;
            for( int t = 0; t < k; ++t )
               kinv( k, t ) = -rho_[t] / sigma;
            kinv( k, k ) = 1.0 / sigma;
            basic_.push_back( j );
            posb_[j] = k;
            status_[j] = kBasic;
            tight_.push_back( q );
            post_[q] = k;
         }
         else
         {
            // replace tight row enter-n by q
            const int out_row = enter - n_;
            const int t0 = post_[out_row];
            const double g0 = rho_[t0];
            std::vector<double> col( k );
            for( int p = 0; p < k; ++p )
               col[p] = kinv( p, t0 );
            for( int t = 0; t < k; ++t )
            {
               if( t == t0 )
                  continue;
               double f = rho_[t] / g0;
               if( f == 0.0 )
                  continue;
               for( int p = 0; p < k; ++p )
                  kinv( p, t ) -= col[p] * f;
            }
            for( int p = 0; p < k; ++p )
               kinv( p, t0 ) = col[p] / g0;
            post_[out_row] = -1;
            tight_[t0] = q;
            post_[q] = t0;
         }
         (void)below;
         return;
      }

      const int p0 = posb_[leave];
      status_[leave] = below ? kLower : kUpper;
      posb_[leave] = -1;
      if( enter < n_ )
      {
         // column replace
         const int j = enter;
         std::vector<double> w( k, 0.0 );
         for( int t = 0; t < k; ++t )
         {
            double ut = coef( tight_[t], j );
            if( ut == 0.0 )
               continue;
            for( int p = 0; p < k; ++p )
               w[p] += kinv( p, t ) * ut;
         }
         const double wp = w[p0];
         for( int t = 0; t < k; ++t )
            kinv( p0, t ) /= wp;
         for( int p = 0; p < k; ++p )
         {
            if( p == p0 || w[p] == 0.0 )
               continue;
            for( int t = 0; t < k; ++t )
               kinv( p, t ) -= w[p] * kinv( p0, t );
         }
         basic_[p0] = j;
         posb_[j] = p0;
         status_[j] = kBasic;
      }
      else
      {
         // shrink: drop basic position p0 and tight position t0
         const int out_row = enter - n_;
         const int t0 = post_[out_row];
         const double m = kinv( p0, t0 );
         std::vector<double> col( k ), row( k );
         for( int p = 0; p < k; ++p )
            col[p] = kinv( p, t0 );
         for( int t = 0; t < k; ++t )
            row[t] = kinv( p0, t );
         for( int p = 0; p < k; ++p )
         {
            if( p == p0 || col[p] == 0.0 )
               continue;
            double f = col[p] / m;
            for( int t = 0; t < k; ++t )
               kinv( p, t ) -= f * row[t];
         }
         const int last = k - 1;
         if( p0 != last )
         {
            for( int t = 0; t < k; ++t )
               kinv( p0, t ) = kinv( last, t );
            basic_[p0] = basic_[last];
            posb_[basic_[p0]] = p0;
         }
         basic_.pop_back();
         if( t0 != last )
         {
            for( int p = 0; p < k; ++p )
               kinv( p, t0 ) = kinv( p, last );
            tight_[t0] = tight_[last];
            post_[tight_[t0]] = t0;
         }
         tight_.pop_back();
         post_[out_row] = -1;
      }
   }

   void
   certificate( int leave, LpSolution& sol ) const
   {
      if( leave >= n_ )
         sol.certificate.push_back( { leave - n_, 1.0 } );
      for( int t = 0; t < kdim(); ++t )
         if( rho_[t] != 0.0 )
            sol.certificate.push_back(
                { tight_[t], leave >= n_ ? -rho_[t] : rho_[t] } );
   }

   void
   finish( LpSolution& sol )
   {
      sol.x = x_;
      for( int j = 0; j < n_; ++j )
         sol.x[j] = std::clamp( sol.x[j], model_.lo[j], model_.hi[j] );
      sol.obj = 0.0;
      for( int j = 0; j < n_; ++j )
         sol.obj += model_.objective[j] * sol.x[j];
      sol.basis.basic_cols = basic_;
      sol.basis.tight_rows = tight_;
      sol.basis.at_upper.assign( n_, 0 );
      for( int j = 0; j < n_; ++j )
         sol.basis.at_upper[j] = status_[j] == kUpper;
   }

   const LpModel& model_;
   LpOptions opt_;
   int n_;
   int r_;
   int max_iter_;

   std::vector<char> status_;
   std::vector<int> posb_;
   std::vector<int> post_;
   std::vector<int> basic_;
   std::vector<int> tight_;
   std::vector<double> kinv_;
   int stride_ = 0;

   std::vector<double> x_;
   std::vector<double> slack_;
   std::vector<double> y_;
   std::vector<double> d_;
   std::vector<double> rho_;
   std::vector<double> alpha_;
};

} // namespace detail

/// Solves the LP relaxation, optionally warm started from a previous basis
/// of a model with the same columns and a prefix of the same rows.
inline LpSolution
lp_solve( const LpModel& model, const LpBasis* warm = nullptr,
          const LpOptions& opt = {} )
{
   detail::DualSimplex simplex( model, opt );
   return simplex.solve( warm );
}

} // namespace pscp

#endif
