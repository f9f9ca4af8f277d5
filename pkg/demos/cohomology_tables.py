"""Twisted cohomology of a point for the preset orientifold groups, degrees 0..3."""

from orientifold import EquivariantCover, IntegersTwisted, ZTwo, cohomology, preset_group


def main():
    for name in ("z2", "h4-q", "q8"):
        G = preset_group(name)
        cover = EquivariantCover.point(G)
        top = 4 if G.order <= 4 else 3
        z = [cohomology(cover, IntegersTwisted(G), p).describe() for p in range(top)]
        z2 = [cohomology(cover, ZTwo(G), p).describe() for p in range(top)]
        print(f"{name:5} Z twisted: {', '.join(z)}")
        print(f"{'':5} Z/2:       {', '.join(z2)}")


if __name__ == "__main__":
    main()
