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

#include "pscp/instance.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pscp;

namespace
{

bool
has_violation( const Instance& inst, const std::string& what )
{
   for( const Violation& v : validate( inst ) )
      if( v.what == what )
         return true;
   return false;
}

} // namespace

TEST( ParseOrlib, SmallInstance )
{
   DeterministicScp scp = parse_orlib( "2 3  1 2 3  2 1 2  1 3" );
   EXPECT_EQ( scp.m, 2 );
   EXPECT_EQ( scp.n, 3 );
   EXPECT_EQ( scp.cost, ( std::vector<std::int64_t>{ 1, 2, 3 } ) );
   EXPECT_EQ( scp.rows, ( std::vector<std::vector<int>>{ { 0, 1 }, { 2 } } ) );
}

TEST( ParseOrlib, MinimalInstance )
{
   DeterministicScp scp = parse_orlib( "1 1  5  1 1" );
   EXPECT_EQ( scp.cost, ( std::vector<std::int64_t>{ 5 } ) );
   EXPECT_EQ( scp.rows, ( std::vector<std::vector<int>>{ { 0 } } ) );
}

TEST( ParseOrlib, SortsAndDeduplicatesRows )
{
   EXPECT_EQ( parse_orlib( "1 2  1 1  2 2 1" ).rows,
              ( std::vector<std::vector<int>>{ { 0, 1 } } ) );
   EXPECT_EQ( parse_orlib( "1 2  1 1  3 2 1 2" ).rows,
              ( std::vector<std::vector<int>>{ { 0, 1 } } ) );
}

TEST( ParseOrlib, LayoutInsensitive )
{
   std::string flat = "3 4 1 2 3 4 2 1 2 3 2 3 4 1 4";
   std::string wrapped = "3\n4\n1 2\n3 4 2\n1\n2 3 2\n3 4\n\n1\t4\n";
   EXPECT_EQ( parse_orlib( flat ), parse_orlib( wrapped ) );
}

TEST( ParseOrlib, Errors )
{
   EXPECT_THROW( parse_orlib( "2 3  1 2 3  2 1 2" ), ParseError );
   EXPECT_THROW( parse_orlib( "1 2  1 1  1 3" ), ParseError );
   EXPECT_THROW( parse_orlib( "1 2  1 1  1 0" ), ParseError );
   EXPECT_THROW( parse_orlib( "1 2  -1 1  1 1" ), ParseError );
   EXPECT_THROW( parse_orlib( "1 2  1 x  1 1" ), ParseError );
}

TEST( ParseOrlib, EmptyRowWarns )
{
   std::vector<std::string> warnings;
   DeterministicScp scp = parse_orlib( "2 2  1 1  0  1 2", &warnings );
   EXPECT_TRUE( scp.rows[0].empty() );
   EXPECT_EQ( warnings.size(), 1u );
}

TEST( Validate, WellFormedInstance )
{
   EXPECT_TRUE( validate( ref::tiny_instance() ).empty() );
}

TEST( Validate, ProbabilitySum )
{
   Instance inst = ref::tiny_instance();
   inst.blocks[0].prob[0] = 0.39;
   auto v = validate( inst );
   ASSERT_EQ( v.size(), 1u );
   EXPECT_EQ( v[0].what, "prob sum" );
   EXPECT_EQ( v[0].row, 0 );
}

TEST( Validate, EpsilonRange )
{
   Instance inst = ref::tiny_instance();
   inst.blocks[0].epsilon = 1.0;
   EXPECT_TRUE( has_violation( inst, "epsilon range" ) );
   inst.blocks[0].epsilon = 0.0;
   EXPECT_TRUE( has_violation( inst, "epsilon range" ) );
}

TEST( Validate, StructuralViolations )
{
   Instance inst = ref::tiny_instance();
   inst.blocks[0].scenarios[2] = { 1, 0 };
   EXPECT_TRUE( has_violation( inst, "support order" ) );
   inst = ref::tiny_instance();
   inst.blocks[0].scenarios[0] = { 2 };
   EXPECT_TRUE( has_violation( inst, "support range" ) );
   inst = ref::tiny_instance();
   inst.blocks[0].col_index[0].clear();
   EXPECT_TRUE( has_violation( inst, "col_index" ) );
   inst = ref::tiny_instance();
   inst.cost[1] = -1.0;
   EXPECT_TRUE( has_violation( inst, "cost sign" ) );
   inst = ref::tiny_instance();
   inst.blocks[0].prob = { 0.0, 0.5, 0.5 };
   EXPECT_TRUE( has_violation( inst, "prob positive" ) );
   inst = ref::tiny_instance();
   inst.m = 2;
   EXPECT_TRUE( has_violation( inst, "block count" ) );
}

TEST( ColumnIndex, Examples )
{
   EXPECT_EQ( build_column_index( 2, { { 0 }, { 1 }, { 0, 1 } } ),
              ( std::vector<std::vector<int>>{ { 0, 2 }, { 1, 2 } } ) );
   EXPECT_EQ( build_column_index( 3, { {}, {} } ),
              ( std::vector<std::vector<int>>( 3 ) ) );
}

TEST( ColumnIndex, TransposeIsInvolutive )
{
   std::mt19937_64 rng( 11 );
   for( int trial = 0; trial < 20; ++trial )
   {
      std::vector<std::vector<int>> sc( 20 );
      std::size_t nnz = 0;
      for( auto& s : sc )
      {
         for( int j = 0; j < 50; ++j )
            if( rng() % 4 == 0 )
               s.push_back( j );
         nnz += s.size();
      }
      auto idx = build_column_index( 50, sc );
      std::size_t total = 0;
      for( int j = 0; j < 50; ++j )
      {
         total += idx[j].size();
         for( int w = 0; w < 20; ++w )
         {
            bool in_sc = std::binary_search( sc[w].begin(), sc[w].end(), j );
            bool in_idx = std::binary_search( idx[j].begin(), idx[j].end(), w );
            EXPECT_EQ( in_sc, in_idx );
         }
      }
      EXPECT_EQ( total, nnz );
      EXPECT_EQ( scenarios_from_column_index( 20, idx ), sc );
   }
}

TEST( InstanceFile, RoundTrip )
{
   for( std::uint64_t seed = 0; seed < 1000; ++seed )
   {
      ref::RandomInstanceSpec spec;
      spec.n = 3 + static_cast<int>( seed % 9 );
      spec.m = 1 + static_cast<int>( seed % 4 );
      spec.empty_prob = 0.1;
      Instance inst = ref::random_instance( seed, spec );
      // non-uniform weights exercise the 17-digit printing
      std::mt19937_64 rng( seed );
      for( auto& b : inst.blocks )
      {
         double sum = 0.0;
         for( double& p : b.prob )
            sum += ( p = 0.1 + static_cast<double>( rng() % 1000 ) / 997.0 );
         for( double& p : b.prob )
            p /= sum;
      }
      if( seed % 2 )
         inst.meta = { { "seed", std::to_string( seed ) }, { "dist", "indep" } };
      ASSERT_EQ( read_instance( write_instance( inst ) ), inst ) << seed;
   }
}

TEST( InstanceFile, EmptyScenarioIsPreserved )
{
   Instance inst = ref::tiny_instance();
   inst.blocks[0] = make_block( 2, { {}, { 1 } }, { 0.5, 0.5 }, 0.1 );
   Instance back = read_instance( write_instance( inst ) );
   EXPECT_TRUE( back.blocks[0].scenarios[0].empty() );
   EXPECT_EQ( back, inst );
}

TEST( InstanceFile, FormatLayout )
{
   std::string text = write_instance( ref::tiny_instance() );
   EXPECT_EQ( text.rfind( "PSCP 1\n1 2\n1 1\n1 3 0.10000000000000001\n"
                          "0.40000000000000002 1 1\n",
                          0 ),
              0u );
}

TEST( InstanceFile, Errors )
{
   std::string text = write_instance( ref::tiny_instance() );
   std::string tampered = text;
   tampered[text.find( "1 3 " )] = '9';
   EXPECT_THROW( read_instance( tampered ), ParseError );

   try
   {
      read_instance( "PSCP 2\n1 1\n1\n" );
      FAIL();
   }
   catch( const ParseError& e )
   {
      EXPECT_NE( std::string( e.what() ).find( "unsupported version" ),
                 std::string::npos );
   }
   EXPECT_THROW( read_instance( "SCP 1\n" ), ParseError );
   EXPECT_THROW( read_instance( "PSCP 1\n1 2\n1 1\n1 1 0.1\n1 1 3\n" ),
                 ParseError );
}

TEST( InstanceFile, ChecksumLineIsOptional )
{
   std::string text = write_instance( ref::tiny_instance() );
   std::string body = text.substr( 0, text.rfind( "checksum" ) );
   EXPECT_EQ( read_instance( body ), ref::tiny_instance() );
}

TEST( DeterministicInstance, OneScenarioPerRow )
{
   Instance inst = deterministic_instance( parse_orlib( "2 3 1 2 3 2 1 2 1 3" ), 0.1 );
   EXPECT_TRUE( validate( inst ).empty() );
   EXPECT_EQ( inst.blocks[1].scenarios,
              ( std::vector<std::vector<int>>{ { 2 } } ) );
}
