"""Province-to-accent-class grouping.

Five classes formed by merging 13 provinces by accent similarity and
geographical proximity. Provinces outside this subset are deliberately
unmapped and raise UnknownProvinceError.
"""

from ..errors import UnknownProvinceError

CLASS_NAMES = ("chuan", "dongbei", "guan", "wu", "yue")

CLASS_PROVINCES = {
    "chuan": ("si chuan", "chong qing"),
    "dongbei": ("ji lin", "liao ning", "hei long jiang"),
    "guan": ("bei jing", "tian jin", "he bei"),
    "wu": ("zhe jiang", "shang hai", "jiang su"),
    "yue": ("guang dong", "guang xi"),
}

PROVINCE_TO_CLASS = {prov: cls for cls, provs in CLASS_PROVINCES.items() for prov in provs}


def province_to_class(province: str) -> str:
    """Map a (normalized, lowercase) province name to its accent class."""
    try:
        return PROVINCE_TO_CLASS[province]
    except KeyError:
        raise UnknownProvinceError(
            f"province {province!r} is not in the 13-province subset") from None


def class_id(accent_class: str) -> int:
    try:
        return CLASS_NAMES.index(accent_class)
    except ValueError:
        raise UnknownProvinceError(f"unknown accent class {accent_class!r}") from None
