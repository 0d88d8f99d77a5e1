"""Worked example instances used by the docs, the CLI and the test suite.

Each builder is parameterized where the construction has a natural knob
(the large-market size M, the perturbation eps); the JSON files shipped in
richads/data pin the default parameters.
"""

from __future__ import annotations

from fractions import Fraction
from importlib import resources

from .model import Advertiser, Instance, RichAd, load_instance


def fx1(eps: Fraction = Fraction(1, 10)) -> Instance:
    """Two symmetric advertisers with a small and a large ad.

    The integral optimum serves one small and one large ad, but whoever
    reveals their small ad ends up with it: hiding the small ad is the
    classic profitable deviation against exact optimization, and the same
    gadget gives the deterministic integral rule its factor-2 welfare floor.
    """
    eps = Fraction(eps)
    value = 1 + eps

    def catalog(prefix: str) -> tuple[RichAd, ...]:
        return (
            RichAd(f"{prefix}x1", alpha=1 / value, space=Fraction(1)),
            RichAd(f"{prefix}x2", alpha=Fraction(1), space=Fraction(2)),
        )

    return Instance(
        advertisers=(
            Advertiser("a", value_per_click=value, ads=catalog("a")),
            Advertiser("b", value_per_click=value, ads=catalog("b")),
        ),
        total_space=Fraction(3),
    )


def fx2(total_space: Fraction = Fraction(4)) -> Instance:
    """Two advertisers, one with a cheap and a rich variant.

    With total space 4 both can be served; shrinking the budget to 7/2
    forces the fractional optimum to split the second advertiser.
    """
    return Instance(
        advertisers=(
            Advertiser(
                "a",
                value_per_click=Fraction(7, 2),
                ads=(
                    RichAd("ax1", alpha=Fraction(4, 7), space=Fraction(1)),
                    RichAd("ax2", alpha=Fraction(1), space=Fraction(3)),
                ),
            ),
            Advertiser(
                "b",
                value_per_click=Fraction(3),
                ads=(RichAd("bx1", alpha=Fraction(1), space=Fraction(3)),),
            ),
        ),
        total_space=Fraction(total_space),
    )


def fx2_tight() -> Instance:
    return fx2(total_space=Fraction(7, 2))


def fx3(m: int = 1000) -> Instance:
    """The 3-approximation's tight family (eps = 1/M).

    The fractional optimum approaches three times what any of the mechanism's
    branches can get: the integral rule earns about M+1, the max-value rule
    about M, while fractions collect almost 3M.
    """
    m = int(m)
    if m < 2:
        raise ValueError("fx3 needs M >= 2")
    eps = Fraction(1, m)
    v_ab = m + eps
    return Instance(
        advertisers=(
            Advertiser(
                "a",
                value_per_click=v_ab,
                ads=(
                    RichAd("ax1", alpha=Fraction(m) / v_ab, space=Fraction(1)),
                    RichAd("ax2", alpha=Fraction(1), space=Fraction(m)),
                ),
            ),
            Advertiser(
                "b",
                value_per_click=v_ab,
                ads=(
                    RichAd("bx1", alpha=(1 + eps) / v_ab, space=Fraction(1)),
                    RichAd("bx2", alpha=Fraction(1), space=Fraction(m)),
                ),
            ),
            Advertiser(
                "c",
                value_per_click=Fraction(m - 1),
                ads=(RichAd("cx1", alpha=Fraction(1), space=Fraction(m - 1)),),
            ),
            Advertiser(
                "d",
                value_per_click=m + 2 * eps,
                ads=(RichAd("dx1", alpha=Fraction(1), space=2 * m - eps),),
            ),
        ),
        total_space=2 * m - eps,
    )


def fx4(m: int = 100) -> Instance:
    """GSP walkthrough pair: a tiny competitor and a rich advertiser.

    The rich advertiser's small ad is worth eps/M against the competitor's
    1/M; underbidding to clear the big ad's tie is the profitable GSP
    deviation this instance exists to exhibit (eps = 1/(2M)).
    """
    m = int(m)
    eps = Fraction(1, 2 * m)
    v2 = 1 + eps * eps
    return Instance(
        advertisers=(
            Advertiser(
                "a",
                value_per_click=Fraction(1, m),
                ads=(RichAd("ax1", alpha=Fraction(1), space=Fraction(1)),),
            ),
            Advertiser(
                "b",
                value_per_click=v2,
                ads=(
                    RichAd("bx1", alpha=(eps / m) / v2, space=Fraction(1)),
                    RichAd("bx2", alpha=Fraction(1), space=Fraction(m)),
                ),
            ),
        ),
        total_space=Fraction(m),
    )


def fx5() -> Instance:
    """Two symmetric single-ad advertisers competing for the whole space."""
    return Instance(
        advertisers=(
            Advertiser("a", value_per_click=Fraction(1), ads=(RichAd("ax1", alpha=Fraction(1), space=Fraction(1)),)),
            Advertiser("b", value_per_click=Fraction(1), ads=(RichAd("bx1", alpha=Fraction(1), space=Fraction(1)),)),
        ),
        total_space=Fraction(1),
    )


def fx6a() -> Instance:
    """Adding a bigger ad can shrink the space auction's held value.

    With the (value 1, space 3) variant reported, the auction upgrades to it
    and holds value 1 instead of 2; the best-fit stage repairs the loss.
    """
    return Instance(
        advertisers=(
            Advertiser(
                "a",
                value_per_click=Fraction(2),
                ads=(
                    RichAd("ax1", alpha=Fraction(1), space=Fraction(2)),
                    RichAd("ax2", alpha=Fraction(1, 2), space=Fraction(3)),
                ),
            ),
            Advertiser(
                "b",
                value_per_click=Fraction(1, 2),
                ads=(RichAd("bx1", alpha=Fraction(1), space=Fraction(3)),),
            ),
        ),
        total_space=Fraction(3),
    )


def fx6b() -> Instance:
    """Greedy bang-per-buck's unbounded gap: a cheap ad blocks a huge one."""
    return Instance(
        advertisers=(
            Advertiser(
                "a",
                value_per_click=Fraction(1, 2),
                ads=(RichAd("ax1", alpha=Fraction(1), space=Fraction(1, 4)),),
            ),
            Advertiser(
                "b",
                value_per_click=Fraction(10),
                ads=(RichAd("bx1", alpha=Fraction(1), space=Fraction(10)),),
            ),
        ),
        total_space=Fraction(10),
    )


BUILDERS = {
    "fx1": fx1,
    "fx2i": fx2,
    "fx2ii": fx2_tight,
    "fx3": fx3,
    "fx4": fx4,
    "fx5": fx5,
    "fx6a": fx6a,
    "fx6b": fx6b,
}


def fixture(name: str) -> Instance:
    """Load a shipped fixture by name from the packaged JSON files."""
    if name not in BUILDERS:
        raise KeyError(f"unknown fixture {name!r}; choices: {sorted(BUILDERS)}")
    path = resources.files("richads").joinpath("data", f"{name}.json")
    with resources.as_file(path) as real:
        return load_instance(real)
