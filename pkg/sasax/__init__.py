"""Surgery, Seifert bundle and Kähler obstruction calculator."""
