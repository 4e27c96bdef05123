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

#ifndef PSCP_SOLVER_HPP
#define PSCP_SOLVER_HPP

#include "pscp/cuts.hpp"
#include "pscp/instance.hpp"
#include "pscp/lp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace pscp
{

/// BD separates fractional points at every node, RBD only at the root.
/// Integer points are always separated.
enum class SeparationMode
{
   bd,
   rbd
};

struct SolverConfig
{
   SeparationMode mode = SeparationMode::bd;
   bool use_initial_cuts = true;
   bool use_mir = true;
   bool use_rens = true;
   double rens_theta = 0.01;
   double time_limit_s = std::numeric_limits<double>::infinity();
   long node_limit = std::numeric_limits<long>::max();
   /// relative gap in percent at which the search stops
   double gap_tol = 0.0;
   int root_separation_rounds = 10;
   int node_separation_rounds = 1;
   long rens_node_budget = 1000;
   std::uint64_t seed = 0;
   /// known optimum used for the RENS primal gap
   std::optional<double> reference_objective;
   bool record_log = false;

   void
   check() const
   {
      if( !( rens_theta > 0.0 && rens_theta < 0.5 ) )
         throw std::invalid_argument( "rens theta must lie in (0, 0.5)" );
      if( !( time_limit_s > 0.0 ) || node_limit <= 0 )
         throw std::invalid_argument( "limits must be positive" );
      if( gap_tol < 0.0 || root_separation_rounds < 0 ||
          node_separation_rounds < 0 || rens_node_budget < 0 )
         throw std::invalid_argument( "negative solver parameter" );
   }
};

enum class SolveStatus
{
   optimal,
   feasible,
   infeasible,
   limit
};

inline const char*
to_string( SolveStatus s )
{
   switch( s )
   {
   case SolveStatus::optimal:
      return "optimal";
   case SolveStatus::feasible:
      return "feasible";
   case SolveStatus::infeasible:
      return "infeasible";
   case SolveStatus::limit:
      return "limit";
   }
   return "?";
}

/// 100 (incumbent - bound) / max(|incumbent|, 1e-10).
inline double
gap_percent( double incumbent, double bound )
{
   return 100.0 * ( incumbent - bound ) /
          std::max( std::abs( incumbent ), 1e-10 );
}

struct LogEvent
{
   double time;
   std::string kind; ///< "cut", "incumbent", "node", "rens"
   long node;
   double value;
   std::string detail;
};

struct RensOutcome
{
   bool ran = false;
   bool fallback = false;
   double objective = std::numeric_limits<double>::infinity();
   long nodes = 0;
   std::optional<double> primal_gap;
};

struct SolveReport
{
   SolveStatus status = SolveStatus::limit;
   std::vector<int> x;
   double objective = std::numeric_limits<double>::infinity();
   double bound = -std::numeric_limits<double>::infinity();
   double end_gap = std::numeric_limits<double>::infinity();
   double root_bound = -std::numeric_limits<double>::infinity();
   double root_gap = std::numeric_limits<double>::infinity();
   long nodes = 0;
   std::size_t cuts_initial = 0;
   std::size_t cuts_benders = 0;
   std::size_t cuts_mir = 0;
   RensOutcome rens;
   double wall_time = 0.0;
   double separation_time = 0.0;
   long lp_iterations = 0;
   std::vector<int> infeasible_rows;
   /// every cut generated during the run
   std::vector<CoveringCut> cuts;
   std::vector<LogEvent> log;

   bool
   has_incumbent() const
   {
      return !x.empty();
   }
};

/// Probability that a 0/1 point covers row i: the weight of scenarios whose
/// support meets supp(x).
inline double
covered_probability( const ScenarioBlock& block, const std::vector<int>& x )
{
   double p = 0.0;
   for( int w = 0; w < block.num_scenarios(); ++w )
   {
      for( int j : block.scenarios[w] )
         if( x[j] != 0 )
         {
            p += block.prob[w];
            break;
         }
   }
   return p;
}

inline bool
row_satisfied( const ScenarioBlock& block, double covered )
{
   return covered >= 1.0 - block.epsilon - tol::probability;
}

/// Lazy feasibility check of an integer point: one Benders cut per row whose
/// probabilistic constraint is violated; empty iff x is feasible.
inline std::vector<CoveringCut>
check_candidate( const Instance& inst, const std::vector<int>& x )
{
   std::vector<double> xd( x.begin(), x.end() );
   std::vector<int> support;
   for( int j = 0; j < inst.n; ++j )
      if( x[j] != 0 )
         support.push_back( j );

   std::vector<CoveringCut> cuts;
   for( int i = 0; i < inst.m; ++i )
   {
      const ScenarioBlock& b = inst.blocks[i];
      CoverageVector cov = eval_coverage( b, xd, support );
      double covered = 0.0;
      for( int w = 0; w < b.num_scenarios(); ++w )
         if( cov[w] >= 0.5 )
            covered += b.prob[w];
      if( row_satisfied( b, covered ) )
         continue;
      cuts.push_back( as_cut( benders_cut_base( b, i, inst.n, cov ),
                              CutOrigin::benders ) );
   }
   return cuts;
}

struct RensResult
{
   std::vector<int> x;
   double objective = 0.0;
   bool fallback = false;
   long nodes = 0;
   std::vector<CoveringCut> new_cuts;
};

namespace detail
{

inline double
cost_of( const Instance& inst, const std::vector<int>& x )
{
   double c = 0.0;
   for( int j = 0; j < inst.n; ++j )
      if( x[j] )
         c += inst.cost[j];
   return c;
}

/// Adds columns to a 0/1 point until it is feasible, greedily by covered
/// probability deficit per unit cost. Terminates because the all-ones point
/// is feasible whenever the screen passes.
inline void
repair( const Instance& inst, std::vector<int>& x )
{
   for( ;; )
   {
      std::vector<double> deficit( inst.m );
      bool ok = true;
      for( int i = 0; i < inst.m; ++i )
      {
         double cov = covered_probability( inst.blocks[i], x );
         deficit[i] = std::max( 0.0, 1.0 - inst.blocks[i].epsilon - cov );
         ok = ok && row_satisfied( inst.blocks[i], cov );
      }
      if( ok )
         return;
      int best = -1;
      double best_score = -1.0;
      for( int j = 0; j < inst.n; ++j )
      {
         if( x[j] )
            continue;
         x[j] = 1;
         double gain = 0.0;
         for( int i = 0; i < inst.m; ++i )
            if( deficit[i] > 0.0 )
               gain += std::min(
                   deficit[i],
                   covered_probability( inst.blocks[i], x ) -
                       ( 1.0 - inst.blocks[i].epsilon - deficit[i] ) );
         x[j] = 0;
         double score = gain / std::max( inst.cost[j], 1e-9 );
         if( score > best_score )
         {
            best_score = score;
            best = j;
         }
      }
      if( best < 0 )
         return;
      x[best] = 1;
   }
}

class BranchAndBendersCut
{
 public:
   using Clock = std::chrono::steady_clock;

   BranchAndBendersCut( const Instance& inst, const SolverConfig& cfg )
       : inst_( inst ), cfg_( cfg ), start_( Clock::now() ), model_( inst.cost )
   {
      integer_costs_ = std::all_of( inst.cost.begin(), inst.cost.end(),
                                    []( double c ) {
                                       return std::abs( c - std::round( c ) ) <
                                              1e-9;
                                    } );
   }

   SolveReport
   run( const std::vector<CoveringCut>* inherited,
        const std::vector<signed char>* fixings )
   {
      cfg_.check();
      report_.infeasible_rows = infeasibility_screen( inst_ );
      if( !report_.infeasible_rows.empty() )
      {
         report_.status = SolveStatus::infeasible;
         return finish();
      }

      if( inherited )
         for( const CoveringCut& c : *inherited )
            add_cut( c, -1 );
      else if( cfg_.use_initial_cuts )
         for( int i = 0; i < inst_.m; ++i )
            add_cut( initial_cut( inst_.blocks[i], i, inst_.n ), 0 );

      Node root;
      root.fix.assign( inst_.n, -1 );
      if( fixings )
         root.fix = *fixings;
      root.bound = -std::numeric_limits<double>::infinity();
      root.id = next_id_++;

      NodeResult rr = process( root, true );
      report_.root_bound = rr.lp_obj;
      if( rr.kind == NodeResult::infeasible && !has_incumbent() )
      {
         report_.status = SolveStatus::infeasible;
         report_.bound = std::numeric_limits<double>::infinity();
         return finish();
      }

      if( cfg_.use_rens && rr.kind == NodeResult::branched )
         run_rens( rr.x );

      if( rr.kind == NodeResult::branched )
         push_children( root, rr );

      bool limit_hit = false;
      while( !open_.empty() )
      {
         update_global_bound();
         if( gap_closed() )
            break;
         if( out_of_time() || report_.nodes >= cfg_.node_limit )
         {
            limit_hit = true;
            break;
         }
         Node node = open_.top();
         open_.pop();
         if( can_prune( node.bound ) )
            continue;
         NodeResult res = process( node, false );
         if( res.kind == NodeResult::branched )
            push_children( node, res );
      }

      if( limit_hit )
         report_.status = SolveStatus::limit;
      else if( !has_incumbent() )
         report_.status = SolveStatus::infeasible;
      else
         report_.status = SolveStatus::optimal;

      if( report_.status == SolveStatus::limit )
      {
         update_global_bound();
         report_.bound = global_bound_;
      }
      else if( has_incumbent() )
      {
         // remaining open nodes, if any, lie within the gap tolerance
         update_global_bound();
         report_.bound = open_.empty() ? report_.objective
                                       : std::min( global_bound_,
                                                   report_.objective );
         if( report_.bound < report_.objective &&
             gap_percent( report_.objective, report_.bound ) > 0.0 &&
             !integer_gap_closed( report_.bound ) )
            report_.status = SolveStatus::feasible;
         else
            report_.bound = report_.objective;
      }
      else
         report_.bound = std::numeric_limits<double>::infinity();
      return finish();
   }

 private:
   struct Node
   {
      std::vector<signed char> fix;
      double bound = 0.0;
      int depth = 0;
      long id = 0;
      LpBasis basis;
   };

   struct NodeOrder
   {
      bool
      operator()( const Node& a, const Node& b ) const
      {
         if( a.bound != b.bound )
            return a.bound > b.bound;
         return a.id > b.id;
      }
   };

   struct NodeResult
   {
      enum Kind
      {
         pruned,
         infeasible,
         integral,
         branched
      } kind = pruned;
      double lp_obj = -std::numeric_limits<double>::infinity();
      std::vector<double> x;
      int branch_var = -1;
      LpBasis basis;
   };

   double
   elapsed() const
   {
      return std::chrono::duration<double>( Clock::now() - start_ ).count();
   }

   bool
   out_of_time() const
   {
      return elapsed() >= cfg_.time_limit_s;
   }

   bool
   has_incumbent() const
   {
      return report_.has_incumbent();
   }

   void
   log( const char* kind, long node, double value, std::string detail = {} )
   {
      if( cfg_.record_log )
         report_.log.push_back(
             { elapsed(), kind, node, value, std::move( detail ) } );
   }

   /// Returns true if the cut was new. `node` < 0 suppresses logging.
   bool
   add_cut( CoveringCut cut, long node )
   {
      LinearRow row = cut.folded();
      if( !pool_.add( cut ) )
         return false;
      model_.add_row( std::move( row ) );
      if( node >= 0 )
         log( "cut", node, cut.rhs,
              std::string( to_string( cut.origin ) ) + " row " +
                  std::to_string( cut.row + 1 ) );
      return true;
   }

   /// Separates every row at a fractional point; returns the number of new
   /// cuts.
   int
   separate_fractional( const std::vector<double>& x, long node )
   {
      auto t0 = Clock::now();
      std::vector<int> support = support_of( x );
      int added = 0;
      for( int i = 0; i < inst_.m; ++i )
      {
         auto sep = separate_row( inst_.blocks[i], i, inst_.n, x, support );
         if( !sep )
            continue;
         added += add_cut( sep->cut, node );
         if( cfg_.use_mir )
            if( auto mir = best_mir_cut( sep->base, x ) )
               added += add_cut( std::move( mir->cut ), node );
      }
      report_.separation_time +=
          std::chrono::duration<double>( Clock::now() - t0 ).count();
      return added;
   }

   bool
   integer_gap_closed( double bound ) const
   {
      return integer_costs_ &&
             std::ceil( bound - 1e-6 ) >= report_.objective - 1e-9;
   }

   bool
   can_prune( double bound ) const
   {
      if( !has_incumbent() )
         return false;
      if( bound >= report_.objective - 1e-9 * std::max( 1.0, std::abs( report_.objective ) ) )
         return true;
      if( integer_gap_closed( bound ) )
         return true;
      return cfg_.gap_tol > 0.0 &&
             gap_percent( report_.objective, bound ) <= cfg_.gap_tol;
   }

   bool
   gap_closed() const
   {
      return has_incumbent() && can_prune( global_bound_ );
   }

   void
   update_global_bound()
   {
      double b = open_.empty() ? ( has_incumbent()
                                       ? report_.objective
                                       : std::numeric_limits<double>::infinity() )
                               : open_.top().bound;
      if( has_incumbent() )
         b = std::min( b, report_.objective );
      global_bound_ = std::max( global_bound_, b );
   }

   void
   set_incumbent( std::vector<int> x, long node, const char* source )
   {
      double obj = cost_of( inst_, x );
      if( has_incumbent() && obj >= report_.objective )
         return;
      report_.x = std::move( x );
      report_.objective = obj;
      log( "incumbent", node, obj, source );
   }

   void
   apply_bounds( const std::vector<signed char>& fix )
   {
      for( int j = 0; j < inst_.n; ++j )
      {
         if( fix[j] < 0 )
            model_.unfix_var( j );
         else
            model_.fix_var( j, fix[j] );
      }
   }

   NodeResult
   process( Node& node, bool is_root )
   {
      ++report_.nodes;
      apply_bounds( node.fix );
      NodeResult res;
      LpBasis basis = node.basis;
      int frac_rounds = 0;
      const int frac_cap =
          is_root ? cfg_.root_separation_rounds
                  : ( cfg_.mode == SeparationMode::bd ? cfg_.node_separation_rounds
                                                      : 0 );
      for( ;; )
      {
         LpSolution lp = lp_solve( model_, basis.empty() ? nullptr : &basis );
         report_.lp_iterations += lp.iterations;
         if( lp.status == LpStatus::iteration_limit )
            lp = lp_solve( model_ );
         if( lp.status != LpStatus::optimal )
         {
            res.kind = NodeResult::infeasible;
            log( "node", node.id, std::numeric_limits<double>::infinity(),
                 "infeasible" );
            return res;
         }
         basis = lp.basis;
         res.lp_obj = std::max( lp.obj, node.bound );
         res.x = lp.x;
         res.basis = basis;
         if( can_prune( res.lp_obj ) )
         {
            res.kind = NodeResult::pruned;
            log( "node", node.id, res.lp_obj, "pruned" );
            return res;
         }

         int branch = most_fractional( lp.x );
         if( branch < 0 )
         {
            std::vector<int> xi( inst_.n );
            for( int j = 0; j < inst_.n; ++j )
               xi[j] = lp.x[j] > 0.5 ? 1 : 0;
            auto cuts = check_candidate( inst_, xi );
            if( cuts.empty() )
            {
               set_incumbent( std::move( xi ), node.id, "lp" );
               res.kind = NodeResult::integral;
               log( "node", node.id, res.lp_obj, "integral" );
               return res;
            }
            int added = 0;
            for( auto& c : cuts )
               added += add_cut( std::move( c ), node.id );
            if( added > 0 )
               continue;
            // the LP already carries these cuts but accepts the point within
            // its tolerances: split on a free variable instead
            res.branch_var = free_variable( node.fix, xi );
            if( res.branch_var < 0 )
            {
               res.kind = NodeResult::infeasible;
               return res;
            }
            res.kind = NodeResult::branched;
            return res;
         }

         if( frac_rounds < frac_cap && !out_of_time() )
         {
            ++frac_rounds;
            if( separate_fractional( lp.x, node.id ) > 0 )
               continue;
         }
         res.branch_var = branch;
         res.kind = NodeResult::branched;
         log( "node", node.id, res.lp_obj, "branched" );
         return res;
      }
   }

   /// Most fractional variable, lowest index on ties; -1 if integral.
   static int
   most_fractional( const std::vector<double>& x )
   {
      int best = -1;
      double best_frac = tol::integrality;
      for( int j = 0; j < static_cast<int>( x.size() ); ++j )
      {
         double f = std::min( x[j], 1.0 - x[j] );
         if( f > best_frac )
         {
            best_frac = f;
            best = j;
         }
      }
      return best;
   }

   static int
   free_variable( const std::vector<signed char>& fix,
                  const std::vector<int>& x )
   {
      int any = -1;
      for( int j = 0; j < static_cast<int>( fix.size() ); ++j )
      {
         if( fix[j] >= 0 )
            continue;
         if( x[j] == 0 )
            return j;
         if( any < 0 )
            any = j;
      }
      return any;
   }

   void
   push_children( const Node& parent, const NodeResult& res )
   {
      for( int value : { 1, 0 } )
      {
         Node child;
         child.fix = parent.fix;
         child.fix[res.branch_var] = static_cast<signed char>( value );
         child.bound = res.lp_obj;
         child.depth = parent.depth + 1;
         child.id = next_id_++;
         child.basis = res.basis;
         open_.push( std::move( child ) );
      }
   }

   void run_rens( const std::vector<double>& x_lp );

   SolveReport
   finish()
   {
      report_.cuts = pool_.cuts();
      report_.cuts_initial = pool_.count( CutOrigin::initial );
      report_.cuts_benders = pool_.count( CutOrigin::benders );
      report_.cuts_mir = pool_.count( CutOrigin::mir );
      if( has_incumbent() )
      {
         report_.end_gap =
             std::max( 0.0, gap_percent( report_.objective, report_.bound ) );
         if( std::isfinite( report_.root_bound ) )
            report_.root_gap =
                gap_percent( report_.objective, report_.root_bound );
         if( report_.rens.ran )
         {
            std::optional<double> ref = cfg_.reference_objective;
            if( !ref && report_.status == SolveStatus::optimal )
               ref = report_.objective;
            if( ref )
               report_.rens.primal_gap =
                   100.0 * ( report_.rens.objective - *ref ) /
                   std::max( std::abs( *ref ), 1e-10 );
         }
      }
      report_.wall_time = elapsed();
      return std::move( report_ );
   }

   const Instance& inst_;
   SolverConfig cfg_;
   Clock::time_point start_;
   LpModel model_;
   CutPool pool_;
   SolveReport report_;
   std::priority_queue<Node, std::vector<Node>, NodeOrder> open_;
   double global_bound_ = -std::numeric_limits<double>::infinity();
   long next_id_ = 0;
   bool integer_costs_ = true;

   friend RensResult rens_impl( const Instance&, const std::vector<double>&,
                                const std::vector<CoveringCut>&,
                                const SolverConfig&, double );
};

inline SolveReport
solve_restricted( const Instance& inst, const SolverConfig& cfg,
                  const std::vector<CoveringCut>* inherited,
                  const std::vector<signed char>* fixings )
{
   BranchAndBendersCut engine( inst, cfg );
   return engine.run( inherited, fixings );
}

inline RensResult
rens_impl( const Instance& inst, const std::vector<double>& x_lp,
           const std::vector<CoveringCut>& pool, const SolverConfig& cfg,
           double time_left )
{
   RensResult out;
   if( cfg.rens_node_budget > 0 && time_left > 0.0 )
   {
      std::vector<signed char> fix( inst.n, -1 );
      for( int j = 0; j < inst.n; ++j )
      {
         if( x_lp[j] <= cfg.rens_theta )
            fix[j] = 0;
         else if( x_lp[j] >= 1.0 - cfg.rens_theta )
            fix[j] = 1;
      }
      SolverConfig sub = cfg;
      sub.use_rens = false;
      sub.node_limit = cfg.rens_node_budget;
      sub.time_limit_s = time_left;
      sub.record_log = false;
      sub.reference_objective.reset();
      SolveReport rep = solve_restricted( inst, sub, &pool, &fix );
      out.nodes = rep.nodes;
      for( auto& c : rep.cuts )
         out.new_cuts.push_back( std::move( c ) );
      if( rep.has_incumbent() )
      {
         out.x = std::move( rep.x );
         out.objective = rep.objective;
         return out;
      }
   }
   // rounding up keeps every nonnegative covering cut satisfied
   out.fallback = true;
   out.x.assign( inst.n, 0 );
   for( int j = 0; j < inst.n; ++j )
      out.x[j] = x_lp[j] > 1e-9 ? 1 : 0;
   if( !check_candidate( inst, out.x ).empty() )
      repair( inst, out.x );
   out.objective = cost_of( inst, out.x );
   return out;
}

inline void
BranchAndBendersCut::run_rens( const std::vector<double>& x_lp )
{
   RensResult r = rens_impl( inst_, x_lp, pool_.cuts(), cfg_,
                             cfg_.time_limit_s - elapsed() );
   report_.rens.ran = true;
   report_.rens.fallback = r.fallback;
   report_.rens.objective = r.objective;
   report_.rens.nodes = r.nodes;
   log( "rens", 0, r.objective, r.fallback ? "fallback" : "subproblem" );
   for( auto& c : r.new_cuts )
      add_cut( std::move( c ), -1 );
   set_incumbent( std::move( r.x ), 0, "rens" );
}

} // namespace detail

/// Branch-and-Benders-cut on the projection of the big-M model onto x.
inline SolveReport
solve( const Instance& inst, const SolverConfig& cfg = {} )
{
   return detail::solve_restricted( inst, cfg, nullptr, nullptr );
}

/// RENS around an LP point: fixes x_j <= theta to 0 and x_j >= 1 - theta to
/// 1, solves the restricted master with a node budget and falls back to the
/// rounded-up point. The result is always feasible for a screened instance.
inline RensResult
rens( const Instance& inst, const std::vector<double>& x_lp,
      const std::vector<CoveringCut>& pool, const SolverConfig& cfg )
{
   return detail::rens_impl( inst, x_lp, pool, cfg, cfg.time_limit_s );
}

} // namespace pscp

#endif
