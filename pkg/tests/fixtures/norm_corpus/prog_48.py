north34 = 'north-34'
south34 = north34.upper()
east34 = [ch for ch in south34 if ch.isalpha()]
print(''.join(east34))
