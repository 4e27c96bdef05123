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

#ifndef PSCP_INSTANCE_HPP
#define PSCP_INSTANCE_HPP

#include "pscp/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace pscp
{

/// Deterministic set covering matrix and costs, as found in the ORLIB
/// archive. Column indices are 0-based in memory.
struct DeterministicScp
{
   int m = 0;
   int n = 0;
   std::vector<std::int64_t> cost;
   /// rows[i] = sorted support of row i
   std::vector<std::vector<int>> rows;

   friend bool operator==( const DeterministicScp&,
                           const DeterministicScp& ) = default;
};

/// Random data of one row: its scenarios, their weights, the reliability
/// level and the column-major index over scenarios.
struct ScenarioBlock
{
   std::vector<std::vector<int>> scenarios;
   std::vector<double> prob;
   double epsilon = 0.0;
   /// col_index[j] = sorted scenarios whose support contains column j
   std::vector<std::vector<int>> col_index;

   int
   num_scenarios() const
   {
      return static_cast<int>( scenarios.size() );
   }

   friend bool operator==( const ScenarioBlock&,
                           const ScenarioBlock& ) = default;
};

struct Instance
{
   int m = 0;
   int n = 0;
   std::vector<double> cost;
   std::vector<ScenarioBlock> blocks;
   /// generator provenance (seed, distribution, flags)
   std::map<std::string, std::string> meta;

   friend bool operator==( const Instance&, const Instance& ) = default;
};

struct Violation
{
   int row;      ///< -1 when not row specific
   int scenario; ///< -1 when not scenario specific
   std::string what;
};

/// Transpose of a block's scenario supports.
inline std::vector<std::vector<int>>
build_column_index( int n, const std::vector<std::vector<int>>& scenarios )
{
   std::vector<std::vector<int>> index( n );
   for( int w = 0; w < static_cast<int>( scenarios.size() ); ++w )
      for( int j : scenarios[w] )
         index[j].push_back( w );
   return index;
}

/// Inverse of build_column_index.
inline std::vector<std::vector<int>>
scenarios_from_column_index( int num_scenarios,
                             const std::vector<std::vector<int>>& col_index )
{
   std::vector<std::vector<int>> scenarios( num_scenarios );
   for( int j = 0; j < static_cast<int>( col_index.size() ); ++j )
      for( int w : col_index[j] )
         scenarios[w].push_back( j );
   return scenarios;
}

/// Builds a block from unsorted supports; sorts, deduplicates and indexes.
inline ScenarioBlock
make_block( int n, std::vector<std::vector<int>> scenarios,
            std::vector<double> prob, double epsilon )
{
   for( auto& s : scenarios )
   {
      std::sort( s.begin(), s.end() );
      s.erase( std::unique( s.begin(), s.end() ), s.end() );
   }
   ScenarioBlock block;
   block.col_index = build_column_index( n, scenarios );
   block.scenarios = std::move( scenarios );
   block.prob = std::move( prob );
   block.epsilon = epsilon;
   return block;
}

inline std::vector<Violation>
validate( const Instance& inst )
{
   std::vector<Violation> out;
   if( inst.m < 0 || inst.n < 0 )
      out.push_back( { -1, -1, "dimension" } );
   if( static_cast<int>( inst.cost.size() ) != inst.n )
      out.push_back( { -1, -1, "cost length" } );
   for( double c : inst.cost )
      if( !( c >= 0.0 ) || !std::isfinite( c ) )
      {
         out.push_back( { -1, -1, "cost sign" } );
         break;
      }
   if( static_cast<int>( inst.blocks.size() ) != inst.m )
   {
      out.push_back( { -1, -1, "block count" } );
      return out;
   }

   for( int i = 0; i < inst.m; ++i )
   {
      const ScenarioBlock& b = inst.blocks[i];
      if( !( b.epsilon > 0.0 && b.epsilon < 1.0 ) )
         out.push_back( { i, -1, "epsilon range" } );
      if( b.prob.size() != b.scenarios.size() )
      {
         out.push_back( { i, -1, "prob length" } );
         continue;
      }
      if( b.scenarios.empty() )
         out.push_back( { i, -1, "no scenarios" } );

      double sum = 0.0;
      bool supports_ok = true;
      for( int w = 0; w < b.num_scenarios(); ++w )
      {
         if( !( b.prob[w] > 0.0 ) )
            out.push_back( { i, w, "prob positive" } );
         sum += b.prob[w];
         const auto& sup = b.scenarios[w];
         for( std::size_t k = 0; k < sup.size(); ++k )
         {
            if( sup[k] < 0 || sup[k] >= inst.n )
            {
               out.push_back( { i, w, "support range" } );
               supports_ok = false;
               break;
            }
            if( k > 0 && sup[k - 1] >= sup[k] )
            {
               out.push_back( { i, w, "support order" } );
               supports_ok = false;
               break;
            }
         }
      }
      if( std::abs( sum - 1.0 ) > tol::prob_sum )
         out.push_back( { i, -1, "prob sum" } );
      if( supports_ok &&
          b.col_index != build_column_index( inst.n, b.scenarios ) )
         out.push_back( { i, -1, "col_index" } );
   }
   return out;
}

namespace detail
{

class TokenReader
{
 public:
   explicit TokenReader( std::istream& in ) : in_( in ) {}

   template <typename T>
   T
   next( const char* what )
   {
      std::string tok;
      if( !( in_ >> tok ) )
         throw ParseError( std::string( "truncated input: expected " ) +
                           what );
      T value{};
      const char* first = tok.data();
      const char* last = tok.data() + tok.size();
      auto res = std::from_chars( first, last, value );
      if( res.ec != std::errc() || res.ptr != last )
         throw ParseError( "malformed " + std::string( what ) + ": '" + tok +
                           "'" );
      return value;
   }

 private:
   std::istream& in_;
};

/// FNV-1a, 64 bit.
inline std::uint64_t
fnv1a( std::string_view data )
{
   std::uint64_t h = 0xcbf29ce484222325ULL;
   for( unsigned char ch : data )
   {
      h ^= ch;
      h *= 0x100000001b3ULL;
   }
   return h;
}

inline std::string
hex64( std::uint64_t v )
{
   char buf[17];
   std::snprintf( buf, sizeof( buf ), "%016llx",
                  static_cast<unsigned long long>( v ) );
   return buf;
}

} // namespace detail

/// Reads an ORLIB set covering file: m n, n costs, then per row a count and
/// that many 1-based column indices. Line layout is irrelevant. Rows with a
/// zero count are accepted and reported through `warnings`.
inline DeterministicScp
parse_orlib( std::istream& in, std::vector<std::string>* warnings = nullptr )
{
   detail::TokenReader tok( in );
   DeterministicScp scp;
   scp.m = tok.next<int>( "row count" );
   scp.n = tok.next<int>( "column count" );
   if( scp.m < 0 || scp.n < 0 )
      throw ParseError( "negative dimension" );

   scp.cost.resize( scp.n );
   for( int j = 0; j < scp.n; ++j )
   {
      scp.cost[j] = tok.next<std::int64_t>( "cost" );
      if( scp.cost[j] < 0 )
         throw ParseError( "negative cost for column " +
                           std::to_string( j + 1 ) );
   }

   scp.rows.resize( scp.m );
   for( int i = 0; i < scp.m; ++i )
   {
      int k = tok.next<int>( "row length" );
      if( k < 0 )
         throw ParseError( "negative row length in row " +
                           std::to_string( i + 1 ) );
      if( k == 0 && warnings != nullptr )
         warnings->push_back( "row " + std::to_string( i + 1 ) +
                              " is empty" );
      auto& row = scp.rows[i];
      row.reserve( k );
      for( int t = 0; t < k; ++t )
      {
         int j = tok.next<int>( "column index" );
         if( j < 1 || j > scp.n )
            throw ParseError( "column index " + std::to_string( j ) +
                              " out of range in row " +
                              std::to_string( i + 1 ) );
         row.push_back( j - 1 );
      }
      std::sort( row.begin(), row.end() );
      row.erase( std::unique( row.begin(), row.end() ), row.end() );
   }
   return scp;
}

inline DeterministicScp
parse_orlib( const std::string& text,
             std::vector<std::string>* warnings = nullptr )
{
   std::istringstream in( text );
   return parse_orlib( in, warnings );
}

/// Instance file, version 1:
///
///    PSCP 1
///    m n
///    c_1 ... c_n
///    i s_i eps_i                 (per row, 1-based i)
///    p k j_1 ... j_k             (s_i lines, 1-based sorted columns)
///    meta key=value ...          (optional)
///    checksum <16 hex digits>    (FNV-1a of everything above)
inline std::string
write_instance( const Instance& inst )
{
   std::string out;
   out += "PSCP 1\n";
   out += std::to_string( inst.m ) + " " + std::to_string( inst.n ) + "\n";
   for( int j = 0; j < inst.n; ++j )
   {
      if( j > 0 )
         out += ' ';
      out += format_double( inst.cost[j] );
   }
   out += '\n';
   for( int i = 0; i < inst.m; ++i )
   {
      const ScenarioBlock& b = inst.blocks[i];
      out += std::to_string( i + 1 ) + " " +
             std::to_string( b.num_scenarios() ) + " " +
             format_double17( b.epsilon ) + "\n";
      for( int w = 0; w < b.num_scenarios(); ++w )
      {
         out += format_double17( b.prob[w] );
         out += ' ';
         out += std::to_string( b.scenarios[w].size() );
         for( int j : b.scenarios[w] )
         {
            out += ' ';
            out += std::to_string( j + 1 );
         }
         out += '\n';
      }
   }
   if( !inst.meta.empty() )
   {
      out += "meta";
      for( const auto& [key, value] : inst.meta )
         out += " " + key + "=" + value;
      out += '\n';
   }
   out += "checksum " + detail::hex64( detail::fnv1a( out ) ) + "\n";
   return out;
}

inline Instance
read_instance( const std::string& text )
{
   // split off and verify the trailing checksum line
   std::string_view body = text;
   std::size_t pos = text.rfind( "checksum " );
   if( pos != std::string::npos && ( pos == 0 || text[pos - 1] == '\n' ) )
   {
      std::string_view line = std::string_view( text ).substr( pos + 9 );
      while( !line.empty() && ( line.back() == '\n' || line.back() == '\r' ||
                                line.back() == ' ' ) )
         line.remove_suffix( 1 );
      body = std::string_view( text ).substr( 0, pos );
      if( detail::hex64( detail::fnv1a( body ) ) != line )
         throw ParseError( "checksum mismatch" );
   }

   std::istringstream in{ std::string( body ) };
   std::string magic;
   if( !( in >> magic ) || magic != "PSCP" )
      throw ParseError( "malformed header: expected 'PSCP'" );
   detail::TokenReader tok( in );
   int version = tok.next<int>( "version" );
   if( version != 1 )
      throw ParseError( "unsupported version " + std::to_string( version ) );

   Instance inst;
   inst.m = tok.next<int>( "row count" );
   inst.n = tok.next<int>( "column count" );
   if( inst.m < 0 || inst.n < 0 )
      throw ParseError( "malformed header: negative dimension" );
   inst.cost.resize( inst.n );
   for( int j = 0; j < inst.n; ++j )
      inst.cost[j] = tok.next<double>( "cost" );

   inst.blocks.reserve( inst.m );
   for( int i = 0; i < inst.m; ++i )
   {
      int idx = tok.next<int>( "row index" );
      if( idx != i + 1 )
         throw ParseError( "row index " + std::to_string( idx ) +
                           " out of sequence" );
      int s = tok.next<int>( "scenario count" );
      if( s < 0 )
         throw ParseError( "negative scenario count" );
      double eps = tok.next<double>( "epsilon" );
      std::vector<std::vector<int>> scenarios( s );
      std::vector<double> prob( s );
      for( int w = 0; w < s; ++w )
      {
         prob[w] = tok.next<double>( "probability" );
         int k = tok.next<int>( "support size" );
         if( k < 0 || k > inst.n )
            throw ParseError( "bad support size" );
         scenarios[w].resize( k );
         for( int t = 0; t < k; ++t )
         {
            int j = tok.next<int>( "column index" );
            if( j < 1 || j > inst.n )
               throw ParseError( "column index " + std::to_string( j ) +
                                 " out of range" );
            scenarios[w][t] = j - 1;
         }
         if( !std::is_sorted( scenarios[w].begin(), scenarios[w].end() ) )
            throw ParseError( "unsorted support" );
      }
      ScenarioBlock b;
      b.col_index = build_column_index( inst.n, scenarios );
      b.scenarios = std::move( scenarios );
      b.prob = std::move( prob );
      b.epsilon = eps;
      inst.blocks.push_back( std::move( b ) );
   }

   std::string word;
   while( in >> word )
   {
      if( word != "meta" )
         throw ParseError( "unexpected trailing token '" + word + "'" );
      std::string rest;
      std::getline( in, rest );
      std::istringstream kv( rest );
      std::string pair;
      while( kv >> pair )
      {
         auto eq = pair.find( '=' );
         if( eq == std::string::npos )
            throw ParseError( "malformed meta entry '" + pair + "'" );
         inst.meta[pair.substr( 0, eq )] = pair.substr( eq + 1 );
      }
   }
   return inst;
}

/// Wraps a deterministic instance as a PSCP with one scenario per row.
inline Instance
deterministic_instance( const DeterministicScp& scp, double epsilon )
{
   Instance inst;
   inst.m = scp.m;
   inst.n = scp.n;
   inst.cost.assign( scp.cost.begin(), scp.cost.end() );
   for( int i = 0; i < scp.m; ++i )
      inst.blocks.push_back( make_block( scp.n, { scp.rows[i] }, { 1.0 },
                                         epsilon ) );
   return inst;
}

} // namespace pscp

#endif
