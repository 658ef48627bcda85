#pragma once
// Generated by tests/oracles/oracles.py (mpmath, 40 digits).  Do not edit.

namespace oracle {

struct Multiplier { int N; double s; double m; };
inline constexpr Multiplier multipliers[] = {
    {1, 0.4, 7.0932436276349844},
    {2, 0.25, 24.026337514890075},
    {3, 0.5, 19.739208802178717},
    {3, 0.75, 16.799583942103914},
};

struct Amu { int N; double s; double mu; double value; };
inline constexpr Amu amus[] = {
    {1, 0.4, 0.1, 0.063097703922364151},
    {1, 0.4, 0.5, -1.1529805587417912},
    {1, 0.4, 0.8, -7.1261260424132756},
    {2, 0.25, 1.0, 5.74216008836904},
    {2, 0.25, 1.75, -12.689986934298404},
    {3, 0.5, 1.0, 6.2831853071795865},
    {3, 0.5, 2.5, -14.804406601634038},
    {3, 0.75, 0.75, 3.7499157694054935},
    {3, 0.75, 2.0, -7.8956835208714869},
};

struct Pointwise { int N; double s; double mu; double r; double value; };
inline constexpr Pointwise pointwise[] = {
    {1, 0.4, 0.2, 0.0, 1.3872509592420279},
    {1, 0.4, 0.2, 0.5, 1.1348436243190527},
    {1, 0.4, 0.2, 3.0, 0.17464454851256234},
    {1, 0.4, 0.2, 40.0, 0.0018121862675141232},
    {1, 0.4, 1.8, 0.0, 6.2533712683618342},
    {1, 0.4, 1.8, 0.5, 3.6010144812724973},
    {1, 0.4, 1.8, 3.0, -0.48945488302370766},
    {1, 0.4, 1.8, 40.0, -0.0091455565245363667},
    {2, 0.25, 1.0, 0.0, 21.29278722571129},
    {2, 0.25, 1.0, 0.5, 17.286294252711881},
    {2, 0.25, 1.0, 3.0, 2.6843381557035344},
    {2, 0.25, 1.0, 40.0, 0.046604878444399876},
    {3, 0.5, 1.0, 0.0, 25.132741228718346},
    {3, 0.5, 1.0, 0.5, 18.706981720107358},
    {3, 0.5, 1.0, 3.0, 1.4975106195141221},
    {3, 0.5, 1.0, 40.0, 0.0078705668004426824},
    {3, 0.5, 2.0, 0.0, 39.478417604357434},
    {3, 0.5, 2.0, 0.5, 25.266187266788758},
    {3, 0.5, 2.0, 3.0, 0.39478417604357434},
    {3, 0.5, 2.0, 40.0, 1.5401998362343583e-5},
    {3, 0.5, 4.0, 0.0, 59.217626406536152},
    {3, 0.5, 4.0, 0.5, 27.792805993467634},
    {3, 0.5, 4.0, 3.0, -0.1184352528130723},
    {3, 0.5, 4.0, 40.0, -7.681758708514273e-6},
};

struct Gauss { int N; double s; double r; double value; };
inline constexpr Gauss gaussian[] = {
    {1, 0.4, 0.0, 5.642983405611154},
    {1, 0.4, 1.0, 1.9006039434562663},
    {1, 0.4, 2.5, -1.2937636730781517},
    {2, 0.25, 0.0, 25.897995809027919},
    {2, 0.25, 1.0, 13.540802332061291},
    {2, 0.25, 2.5, -0.88865592659904675},
    {3, 0.5, 0.0, 31.499219891444839},
    {3, 0.5, 1.0, 15.74960994572242},
    {3, 0.5, 2.5, -0.84960081953072447},
    {3, 0.75, 0.0, 36.120784901560631},
    {3, 0.75, 1.0, 16.285653687920542},
    {3, 0.75, 2.5, -1.5115659032163615},
};

}  // namespace oracle
