// Generated by scripts/gen_sts_reference.py; do not edit by hand.
// Ten 100000-bit blocks from SplitMix64 seeds 1..10;
// p-values computed with an independent numpy/scipy implementation.
// Min |DFT bin - threshold| across blocks: 0.000459558
#pragma once

constexpr int STS_REF_BLOCKS = 10;
constexpr int STS_REF_TESTS = 10;
constexpr int STS_REF_BLOCK_BITS = 100000;
constexpr unsigned STS_REF_SERIAL_M = 10;
constexpr unsigned STS_REF_APEN_M = 8;
constexpr unsigned STS_REF_BLOCKFREQ_M = 1000;

// rows: blocks; columns: frequency, block_frequency, runs, longest_run,
// cusum_fwd, cusum_rev, serial_1, serial_2, approximate_entropy, dft
constexpr double STS_REF_P[STS_REF_BLOCKS][STS_REF_TESTS] = {
    {0.110983539455, 0.583763969149, 0.42450939938, 0.776696083867, 0.192480363319, 0.103597914209, 0.0617935149818, 0.305589736468, 0.0566466497798, 0.976849397285},
    {0.290876513458, 0.800115048081, 0.856667995933, 0.632258054296, 0.513822547531, 0.282854360632, 0.816737855914, 0.739280354472, 0.697487100527, 0.383988163398},
    {0.440353892778, 0.895847461912, 0.456622866902, 0.767665329225, 0.624103955526, 0.382912527083, 0.708177099614, 0.56969507488, 0.718314689241, 0.749567615603},
    {0.732707644588, 0.497455668433, 0.482892714218, 0.100337312074, 0.398129936841, 0.682627887004, 0.150760247261, 0.101140997993, 0.400413679309, 0.861775635059},
    {0.97981709269, 0.79324158655, 0.577826110723, 0.62125203771, 0.37230167192, 0.389382440315, 0.96899188631, 0.578946867853, 0.99327394704, 0.663355026977},
    {0.432896447327, 0.00156011755094, 0.0114749399828, 0.391978220626, 0.201500938458, 0.759722196896, 0.62948662335, 0.579305578604, 0.612036523643, 0.222920073483},
    {0.192623109858, 0.850450187612, 0.770369752284, 0.258724154307, 0.27107135251, 0.072059754188, 0.439725902351, 0.730105492895, 0.187132924056, 0.907592150927},
    {0.839615151923, 0.859491673729, 0.326870945214, 0.804140233164, 0.647327197705, 0.473086487656, 0.875236721666, 0.506951247329, 0.942484760115, 0.0719900380831},
    {0.914378490047, 0.512764680499, 0.680975233983, 0.354044005385, 0.803342599609, 0.703384447089, 0.222872564115, 0.568165501737, 0.101093815858, 0.450551866434},
    {0.45548770452, 0.772550143004, 0.152396188621, 0.531882830148, 0.480562867122, 0.656107082038, 0.60361949984, 0.826522486042, 0.292754976648, 0.338250046857},
};
