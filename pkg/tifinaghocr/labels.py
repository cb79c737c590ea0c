"""
Registry of the 33 IRCAM Tifinagh letters used as class labels.

Labels are indices into the letters sorted by their Unicode code point sequence. The two
labialized letters (yagw and yakw) are written as a base letter followed by the labialization mark
U+2D6F.

(c) 2025 The tifinaghocr authors.

This file is part of tifinaghocr released under the BSD 3-Clause License. See LICENSE.md.
"""
import typing

import tifinaghocr.errors

NUM_CLASSES = 33
LABIALIZATION_MARK = 'ⵯ'

IRCAM_LETTERS = [
    ('ⴰ', 'ya'),
    ('ⴱ', 'yab'),
    ('ⴳ', 'yag'),
    ('ⴳ' + LABIALIZATION_MARK, 'yagw'),
    ('ⴷ', 'yad'),
    ('ⴹ', 'yadd'),
    ('ⴻ', 'yey'),
    ('ⴼ', 'yaf'),
    ('ⴽ', 'yak'),
    ('ⴽ' + LABIALIZATION_MARK, 'yakw'),
    ('ⵀ', 'yah'),
    ('ⵃ', 'yahh'),
    ('ⵄ', 'yaa'),
    ('ⵅ', 'yakh'),
    ('ⵇ', 'yaq'),
    ('ⵉ', 'yi'),
    ('ⵊ', 'yazh'),
    ('ⵍ', 'yal'),
    ('ⵎ', 'yam'),
    ('ⵏ', 'yan'),
    ('ⵓ', 'yu'),
    ('ⵔ', 'yar'),
    ('ⵕ', 'yarr'),
    ('ⵖ', 'yagh'),
    ('ⵙ', 'yas'),
    ('ⵚ', 'yass'),
    ('ⵛ', 'yash'),
    ('ⵜ', 'yat'),
    ('ⵟ', 'yatt'),
    ('ⵡ', 'yaw'),
    ('ⵢ', 'yay'),
    ('ⵣ', 'yaz'),
    ('ⵥ', 'yazz')
]


class LabelEntry:
    """One letter of the alphabet and its class index."""

    def __init__(self, index: int, letter: str, name: str):
        """Create a new registry entry.

        Args:
            index: Class index in [0, 33).
            letter: The Tifinagh letter as one or two code points.
            name: Romanized name like "yab".
        """
        self._index = index
        self._letter = letter
        self._name = name

    def get_index(self) -> int:
        """Get the class index.

        Returns:
            Index in [0, 33).
        """
        return self._index

    def get_letter(self) -> str:
        """Get the letter as text.

        Returns:
            String of one code point or, for labialized letters, two.
        """
        return self._letter

    def get_base_code_point(self) -> int:
        """Get the code point of the base letter.

        Labialized letters like yagw report their base letter, here yag, without the U+2D6F
        suffix. Use get_code_points for the full sequence.

        Returns:
            Integer code point within the Tifinagh block.
        """
        return ord(self._letter[0])

    def get_code_points(self) -> typing.Tuple[int, ...]:
        """Get every code point of the letter.

        Returns:
            Tuple of integer code points.
        """
        return tuple(ord(x) for x in self._letter)

    def get_name(self) -> str:
        """Get the romanized name.

        Returns:
            Name like "yab".
        """
        return self._name


class LabelRegistry:
    """Mapping between class indices and Tifinagh letters."""

    def __init__(self, entries: typing.List[LabelEntry]):
        """Create a new registry.

        Args:
            entries: Entries with dense unique indices and unique letters.

        Raises:
            ConfigError: Raised if the entries do not form a valid 33 letter registry.
        """
        if len(entries) != NUM_CLASSES:
            raise tifinaghocr.errors.ConfigError(
                'Expected %d letters, got %d.' % (NUM_CLASSES, len(entries))
            )

        indices = [x.get_index() for x in entries]
        if sorted(indices) != list(range(NUM_CLASSES)):
            raise tifinaghocr.errors.ConfigError('Label indices must be dense and unique.')

        letters = set(x.get_letter() for x in entries)
        if len(letters) != NUM_CLASSES:
            raise tifinaghocr.errors.ConfigError('Letters must be unique.')

        self._entries = sorted(entries, key=lambda x: x.get_index())
        self._by_name = dict(map(lambda x: (x.get_name(), x), self._entries))

    def get_entries(self) -> typing.List[LabelEntry]:
        """Get all entries in index order.

        Returns:
            List of 33 entries.
        """
        return list(self._entries)

    def get_entry(self, index: int) -> LabelEntry:
        """Get the entry for a class index.

        Args:
            index: Class index.

        Returns:
            The matching entry.

        Raises:
            LabelError: Raised if the index is out of range.
        """
        if not self.is_valid(index):
            raise tifinaghocr.errors.LabelError(
                'Label %d is outside [0, %d).' % (index, NUM_CLASSES),
                index
            )

        return self._entries[index]

    def get_name(self, index: int) -> str:
        """Get the romanized name for a class index."""
        return self.get_entry(index).get_name()

    def get_index_by_name(self, name: str) -> int:
        """Find the class index of a romanized name.

        Args:
            name: Name like "yab".

        Returns:
            Class index.
        """
        if name not in self._by_name:
            raise tifinaghocr.errors.ConfigError('Unknown letter name: %s' % name)

        return self._by_name[name].get_index()

    def is_valid(self, index: int) -> bool:
        """Determine if an integer is a valid class index."""
        return 0 <= index < NUM_CLASSES

    def get_size(self) -> int:
        """Get the number of classes.

        Returns:
            Always 33.
        """
        return len(self._entries)


def build_registry() -> LabelRegistry:
    """Build the standard registry ordered by code point sequence.

    Returns:
        Registry of the 33 IRCAM letters.
    """
    letters_sorted = sorted(IRCAM_LETTERS, key=lambda x: tuple(ord(c) for c in x[0]))
    entries = [
        LabelEntry(index, letter, name)
        for index, (letter, name) in enumerate(letters_sorted)
    ]
    return LabelRegistry(entries)
