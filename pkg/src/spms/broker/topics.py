"""Topic and topic-filter well-formedness checks.

Checked once at subscribe/publish time so the hot matching path can assume
clean inputs. An ill-formed filter is refused with SubAck code 0x80.
"""


def is_valid_topic(topic: str) -> bool:
    """Topic names are non-empty and wildcard-free."""
    return bool(topic) and "+" not in topic and "#" not in topic


def is_valid_filter(topic_filter: str) -> bool:
    """'+' must stand alone in its level; '#' must stand alone in the last."""
    if not topic_filter:
        return False
    levels = topic_filter.split("/")
    for i, level in enumerate(levels):
        if "#" in level:
            if level != "#" or i != len(levels) - 1:
                return False
        elif "+" in level and level != "+":
            return False
    return True
