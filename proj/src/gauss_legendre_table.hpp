// Gauss-Legendre nodes and weights on [0,1], m = 1..10.
// Generated with mpmath at 40 digits; printed to 25 significant digits.
#pragma once

#include <array>

namespace wgq::detail {

inline constexpr int kTableSize = 10;

struct GaussLegendreRow {
  int count;
  std::array<double, kTableSize> nodes;
  std::array<double, kTableSize> weights;
};

inline constexpr std::array<GaussLegendreRow, kTableSize> kGaussLegendre01 = {{
    {1,
     {0.5},
     {1.0}},
    {2,
     {0.2113248654051871177454256, 0.7886751345948128822545744},
     {0.5, 0.5}},
    {3,
     {0.1127016653792583114820735, 0.5, 0.8872983346207416885179265},
     {0.2777777777777777777777778, 0.4444444444444444444444444, 0.2777777777777777777777778}},
    {4,
     {0.06943184420297371238802676, 0.3300094782075718675986671, 0.6699905217924281324013329, 0.9305681557970262876119732},
     {0.173927422568726928686532, 0.326072577431273071313468, 0.326072577431273071313468, 0.173927422568726928686532}},
    {5,
     {0.04691007703066800360118656, 0.2307653449471584544818428, 0.5, 0.7692346550528415455181572, 0.9530899229693319963988134},
     {0.118463442528094543757132, 0.2393143352496832340206458, 0.2844444444444444444444444, 0.2393143352496832340206458, 0.118463442528094543757132}},
    {6,
     {0.03376524289842398609384922, 0.1693953067668677431693002, 0.3806904069584015456847491, 0.6193095930415984543152509, 0.8306046932331322568306998, 0.9662347571015760139061508},
     {0.08566224618958517252014807, 0.1803807865240693037849168, 0.2339569672863455236949352, 0.2339569672863455236949352, 0.1803807865240693037849168, 0.08566224618958517252014807}},
    {7,
     {0.02544604382862073773690516, 0.1292344072003027800680676, 0.2970774243113014165466968, 0.5, 0.7029225756886985834533032, 0.8707655927996972199319324, 0.9745539561713792622630948},
     {0.06474248308443484663530572, 0.1398526957446383339507339, 0.1909150252525594724751849, 0.208979591836734693877551, 0.1909150252525594724751849, 0.1398526957446383339507339, 0.06474248308443484663530572}},
    {8,
     {0.01985507175123188415821957, 0.101666761293186630204223, 0.2372337950418355070911305, 0.4082826787521750975302619, 0.5917173212478249024697381, 0.7627662049581644929088695, 0.898333238706813369795777, 0.9801449282487681158417804},
     {0.05061426814518812957626568, 0.111190517226687235272178, 0.1568533229389436436689811, 0.1813418916891809914825752, 0.1813418916891809914825752, 0.1568533229389436436689811, 0.111190517226687235272178, 0.05061426814518812957626568}},
    {9,
     {0.0159198802461869550822119, 0.08198444633668210285028511, 0.193314283649704801345649, 0.337873288298095535480731, 0.5, 0.662126711701904464519269, 0.806685716350295198654351, 0.9180155536633178971497149, 0.9840801197538130449177881},
     {0.04063719418078720598594608, 0.09032408034742870202923602, 0.1303053482014677311593714, 0.1561735385200014200343152, 0.1651196775006298815822625, 0.1561735385200014200343152, 0.1303053482014677311593714, 0.09032408034742870202923602, 0.04063719418078720598594608}},
    {10,
     {0.01304673574141413996101799, 0.06746831665550774463395166, 0.1602952158504877968828363, 0.283302302935376404600367, 0.425562830509184394557587, 0.574437169490815605442413, 0.716697697064623595399633, 0.8397047841495122031171637, 0.9325316833444922553660483, 0.986953264258585860038982},
     {0.0333356721543440687967844, 0.07472567457529029657288817, 0.1095431812579910219977675, 0.1346333596549981775456135, 0.1477621123573764350869465, 0.1477621123573764350869465, 0.1346333596549981775456135, 0.1095431812579910219977675, 0.07472567457529029657288817, 0.0333356721543440687967844}},
}};

}  // namespace wgq::detail
