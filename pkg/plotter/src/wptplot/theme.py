"""One fixed style so identical inputs render identical images.

Everything visual lives here: sizes, colors, markers, and the PNG metadata
override that strips the library version string from the file. No timestamps
anywhere, so reruns are byte-identical.
"""

FIGSIZE = (6.4, 4.2)
MAP_FIGSIZE = (5.6, 5.6)
DPI = 120

# Curve colors keyed by the variant names the simulator writes; anything
# unknown falls back to the cycle below.
VARIANT_COLORS = {
    "cf": "#1f77b4",
    "cf-lsfd": "#17becf",
    "sc": "#d62728",
    "cellular": "#2ca02c",
}
COLOR_CYCLE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
               "#8c564b", "#e377c2", "#7f7f7f")

# Flight-map marker styles per positions-file role.
ROLE_STYLES = {
    "ap": dict(marker="^", s=70, facecolor="none", edgecolor="#1f77b4",
               linewidths=1.5, zorder=4),
    "bs": dict(marker="s", s=80, facecolor="none", edgecolor="#7f7f7f",
               linewidths=1.5, zorder=4),
    "tue": dict(marker="X", s=80, color="#d62728", zorder=4),
    "start": dict(marker="o", s=70, color="#2ca02c", zorder=5),
    "dest": dict(marker="*", s=160, color="#e6b400", zorder=5),
}

GRID = dict(alpha=0.3, linewidth=0.6)
BAR_COLORS = ("#1f77b4", "#17becf")

# Fixed PNG text chunk (matplotlib would otherwise embed its version).
PNG_METADATA = {"Software": "wptplot"}


def color_for(variant: str, index: int) -> str:
    return VARIANT_COLORS.get(variant, COLOR_CYCLE[index % len(COLOR_CYCLE)])
