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

#ifndef PSCP_ORACLE_HPP
#define PSCP_ORACLE_HPP

#include "pscp/common.hpp"
#include "pscp/instance.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pscp
{

inline constexpr int oracle_max_columns = 25;

struct OracleResult
{
   bool feasible = false;
   std::vector<int> x;
   double objective = 0.0;
};

/// "obj bitstring", e.g. "2 11"; "infeasible" otherwise.
inline std::string
format_oracle( const OracleResult& r )
{
   if( !r.feasible )
      return "infeasible";
   std::string bits;
   for( int v : r.x )
      bits.push_back( v ? '1' : '0' );
   return format_double( r.objective ) + " " + bits;
}

/// Exhaustive search over {0,1}^n. Among minimum-cost points the
/// lexicographically smallest bitstring x_1..x_n wins.
inline OracleResult
brute_force( const Instance& inst )
{
   if( inst.n > oracle_max_columns )
      throw std::invalid_argument( "brute force refused: n = " +
                                   std::to_string( inst.n ) + " exceeds " +
                                   std::to_string( oracle_max_columns ) );
   const int n = inst.n;
   // bit (n-1-j) holds x_j so that integer order equals bitstring order
   auto bit_of = [n]( int j ) { return std::uint32_t{ 1 } << ( n - 1 - j ); };
   std::vector<std::vector<std::uint32_t>> masks( inst.m );
   for( int i = 0; i < inst.m; ++i )
      for( const auto& sc : inst.blocks[i].scenarios )
      {
         std::uint32_t mk = 0;
         for( int j : sc )
            mk |= bit_of( j );
         masks[i].push_back( mk );
      }

   OracleResult best;
   const std::uint64_t total = std::uint64_t{ 1 } << n;
   for( std::uint64_t key = 0; key < total; ++key )
   {
      double cost = 0.0;
      for( int j = 0; j < n; ++j )
         if( key & bit_of( j ) )
            cost += inst.cost[j];
      if( best.feasible && cost > best.objective + 1e-9 )
         continue;
      if( best.feasible && cost >= best.objective - 1e-9 )
         continue; // ties keep the earlier, lexicographically smaller point
      bool ok = true;
      for( int i = 0; i < inst.m && ok; ++i )
      {
         const ScenarioBlock& b = inst.blocks[i];
         double p = 0.0;
         for( std::size_t w = 0; w < masks[i].size(); ++w )
            if( masks[i][w] & key )
               p += b.prob[w];
         ok = p >= 1.0 - b.epsilon - tol::probability;
      }
      if( !ok )
         continue;
      best.feasible = true;
      best.objective = cost;
      best.x.assign( n, 0 );
      for( int j = 0; j < n; ++j )
         best.x[j] = ( key & bit_of( j ) ) ? 1 : 0;
   }
   return best;
}

struct FeasibilityReport
{
   std::vector<double> probability;
   bool feasible = true;
};

inline FeasibilityReport
check_feasibility( const Instance& inst, const std::vector<int>& x )
{
   if( static_cast<int>( x.size() ) != inst.n )
      throw std::invalid_argument( "point length differs from n" );
   FeasibilityReport r;
   for( int i = 0; i < inst.m; ++i )
   {
      const ScenarioBlock& b = inst.blocks[i];
      double p = 0.0;
      for( int w = 0; w < b.num_scenarios(); ++w )
         for( int j : b.scenarios[w] )
            if( x[j] )
            {
               p += b.prob[w];
               break;
            }
      r.probability.push_back( p );
      r.feasible = r.feasible && p >= 1.0 - b.epsilon - tol::probability;
   }
   return r;
}

inline std::string
x_name( int j )
{
   return "x_" + std::to_string( j + 1 );
}

inline std::string
z_name( int i, int w )
{
   return "z_" + std::to_string( i + 1 ) + "_" + std::to_string( w + 1 );
}

namespace detail
{

class LpTextWriter
{
 public:
   explicit LpTextWriter( std::ostringstream& out ) : out_( out ) {}

   void
   begin( const std::string& label )
   {
      out_ << " " << label << ":";
      terms_ = 0;
   }

   void
   term( double coef, const std::string& var )
   {
      if( terms_ > 0 && terms_ % 8 == 0 )
         out_ << "\n   ";
      out_ << ( coef < 0 ? " - " : ( terms_ == 0 ? " " : " + " ) )
           << format_double17( std::abs( coef ) ) << " " << var;
      ++terms_;
   }

   void
   end( const std::string& tail )
   {
      out_ << tail << "\n";
   }

 private:
   std::ostringstream& out_;
   int terms_ = 0;
};

} // namespace detail

/// Big-M model in CPLEX LP format:
///   min c x  s.t.  A_i^w x - z_i_w >= 0,  sum_w p_i^w z_i_w >= 1 - eps_i,
/// x binary and z binary or in [0,1] when relax_z is set.
inline std::string
export_bigm( const Instance& inst, bool relax_z )
{
   std::ostringstream out;
   detail::LpTextWriter w( out );
   out << "\\ PSCP big-M model m=" << inst.m << " n=" << inst.n << "\n";
   out << "Minimize\n";
   w.begin( "obj" );
   for( int j = 0; j < inst.n; ++j )
      w.term( inst.cost[j], x_name( j ) );
   w.end( "" );
   out << "Subject To\n";
   for( int i = 0; i < inst.m; ++i )
   {
      const ScenarioBlock& b = inst.blocks[i];
      for( int s = 0; s < b.num_scenarios(); ++s )
      {
         w.begin( "link_" + std::to_string( i + 1 ) + "_" +
                  std::to_string( s + 1 ) );
         for( int j : b.scenarios[s] )
            w.term( 1.0, x_name( j ) );
         w.term( -1.0, z_name( i, s ) );
         w.end( " >= 0" );
      }
      w.begin( "prob_" + std::to_string( i + 1 ) );
      for( int s = 0; s < b.num_scenarios(); ++s )
         w.term( b.prob[s], z_name( i, s ) );
      w.end( " >= " + format_double17( 1.0 - b.epsilon ) );
   }
   if( relax_z )
   {
      out << "Bounds\n";
      for( int i = 0; i < inst.m; ++i )
         for( int s = 0; s < inst.blocks[i].num_scenarios(); ++s )
            out << " 0 <= " << z_name( i, s ) << " <= 1\n";
   }
   out << "Binaries\n";
   for( int j = 0; j < inst.n; ++j )
      out << " " << x_name( j ) << "\n";
   if( !relax_z )
      for( int i = 0; i < inst.m; ++i )
         for( int s = 0; s < inst.blocks[i].num_scenarios(); ++s )
            out << " " << z_name( i, s ) << "\n";
   out << "End\n";
   return out.str();
}

struct LpTerm
{
   std::string var;
   double coef;
   bool operator==( const LpTerm& ) const = default;
};

struct LpConstraint
{
   std::string name;
   std::vector<LpTerm> terms;
   std::string sense;
   double rhs = 0.0;
   bool operator==( const LpConstraint& ) const = default;
};

struct LpBound
{
   double lo, hi;
   bool operator==( const LpBound& ) const = default;
};

/// Subset of the LP format emitted by export_bigm.
struct LpText
{
   std::vector<LpTerm> objective;
   std::vector<LpConstraint> constraints;
   std::map<std::string, LpBound> bounds;
   std::vector<std::string> binaries;
};

inline LpText
parse_lp_text( const std::string& text )
{
   LpText out;
   std::istringstream lines( text );
   std::string line;
   std::string section;
   std::vector<std::string> tokens;

   auto flush_expr = [&]() {
      if( tokens.empty() )
         return;
      LpConstraint c;
      std::size_t k = 0;
      if( tokens[0].back() == ':' )
      {
         c.name = tokens[0].substr( 0, tokens[0].size() - 1 );
         k = 1;
      }
      double sign = 1.0;
      for( ; k < tokens.size(); ++k )
      {
         const std::string& t = tokens[k];
         if( t == "+" )
            sign = 1.0;
         else if( t == "-" )
            sign = -1.0;
         else if( t == ">=" || t == "<=" || t == "=" )
         {
            c.sense = t;
            if( k + 1 >= tokens.size() )
               throw ParseError( "missing right-hand side in " + c.name );
            c.rhs = std::stod( tokens[k + 1] );
            break;
         }
         else
         {
            if( k + 1 >= tokens.size() )
               throw ParseError( "dangling coefficient in " + c.name );
            c.terms.push_back( { tokens[k + 1], sign * std::stod( t ) } );
            sign = 1.0;
            ++k;
         }
      }
      if( section == "objective" )
         out.objective = std::move( c.terms );
      else
         out.constraints.push_back( std::move( c ) );
      tokens.clear();
   };

   while( std::getline( lines, line ) )
   {
      if( line.empty() || line[0] == '\\' )
         continue;
      std::istringstream ls( line );
      std::vector<std::string> words;
      for( std::string t; ls >> t; )
         words.push_back( t );
      if( words.empty() )
         continue;
      bool continuation = line[0] == ' ' && words[0].back() != ':';
      if( !continuation || section == "bounds" || section == "binaries" )
         flush_expr();

      if( line[0] != ' ' )
      {
         std::string head = words[0];
         if( head == "Minimize" )
            section = "objective";
         else if( head == "Subject" )
            section = "constraints";
         else if( head == "Bounds" )
            section = "bounds";
         else if( head == "Binaries" )
            section = "binaries";
         else if( head == "End" )
            section = "end";
         else
            throw ParseError( "unknown section '" + head + "'" );
         continue;
      }
      if( section == "bounds" )
      {
         if( words.size() != 5 || words[1] != "<=" || words[3] != "<=" )
            throw ParseError( "malformed bound line" );
         out.bounds[words[2]] = { std::stod( words[0] ),
                                  std::stod( words[4] ) };
      }
      else if( section == "binaries" )
         out.binaries.insert( out.binaries.end(), words.begin(), words.end() );
      else if( section == "objective" || section == "constraints" )
         tokens.insert( tokens.end(), words.begin(), words.end() );
      else
         throw ParseError( "text outside a section" );
   }
   flush_expr();
   if( section != "end" )
      throw ParseError( "missing End" );
   return out;
}

} // namespace pscp

#endif
