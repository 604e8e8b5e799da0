// Build a Lubin-Tate law over Z/5^6, let O^> act on it, recover addition
// from the action and read the law back off the universal presentation.
#include <iostream>

#include "fgl/lubin_tate.hpp"
#include "fgl/recovery.hpp"
#include "fgl/universal.hpp"

int main()
{
    using namespace fgl;

    const Ring out = make_padic(5, 6);
    const LubinTateDatum d = multiplicative_preset(out, 6);
    const FormalGroupLaw F = build_fgl(d).law;
    std::cout << "F = " << F.series() << "\n";

    std::vector<RingElement> scalars;
    for (long a : {1, 2, 3, 4, 5}) {
        scalars.push_back(RingElement::integer(d.ring, a));
    }
    const MonoidAction A = build_action(d, F, scalars);
    std::cout << "action verified: " << std::boolalpha << verify_action(A).passed() << "\n";

    const auto sum = recover_sum(A, &find_entry(A, "2"), &find_entry(A, "3"));
    std::cout << "2 + 3 recovered as " << (sum.match ? sum.match->label : std::string("0")) << "\n";

    const Monoid M = free_monoid({"a"});
    const Presentation P = generate_presentation(M, 4);
    const LubinTateDatum d4 = multiplicative_preset(out, 4);
    const MonoidAction Aa = build_free_action(d4, build_fgl(d4).law, M, {RingElement::integer(d4.ring, 2)});
    const Classification cls = classify_fgl(P, Aa);
    std::cout << "relations in L_M: " << P->ideal.size() << ", killed by F: " << std::boolalpha << cls.ideal.passed() << "\n";
    for (const auto &name : P->ring->variables()) {
        std::cout << "  " << name << " -> " << cls.hom.image(name) << "\n";
    }
}
